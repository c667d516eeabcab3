//! Per-generation patch extinction events.

use rand::RngCore;

use crate::lattice::Domain;
use crate::params::Params;
use crate::rng::{derive_stream, unit_f64, RngKey, Role};

/// One Bernoulli(p) bit per patch for one generation; `true` means extinct.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtinctionField {
    generation: u64,
    domain: Domain,
    bits: Vec<bool>,
}

impl ExtinctionField {
    pub fn from_bits(generation: u64, domain: Domain, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), domain.len(), "one bit per patch");
        Self {
            generation,
            domain,
            bits,
        }
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    /// Extinction bit of `patch`, or `None` if the field does not cover it.
    pub fn is_extinct(&self, patch: i64) -> Option<bool> {
        self.domain.index(patch).map(|i| self.bits[i])
    }

    pub fn count_extinct(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }
}

/// The uniform behind the extinction bit of `patch`; thresholding it at different
/// p couples runs monotonically in p.
pub fn extinction_uniform(seed: u64, generation: u64, patch: i64) -> f64 {
    unit_f64(derive_stream(RngKey::new(seed, generation, patch, Role::Extinction, 0)).next_u64())
}

pub fn sample_extinction_field(params: &Params, generation: u64, domain: Domain, seed: u64) -> ExtinctionField {
    let p = params.extinction;
    let bits = domain
        .patches()
        .map(|patch| extinction_uniform(seed, generation, patch) < p)
        .collect();
    ExtinctionField::from_bits(generation, domain, bits)
}
