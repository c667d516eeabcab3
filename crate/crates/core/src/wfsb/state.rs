use std::io::{self, Write};

use crate::lattice::Domain;
use crate::params::Params;

/// Seed-bank content of every stored patch: M compartments, each a type bit and an age.
///
/// Compartments are indexed `0..M` within a patch. Ages saturate at H + 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeedBankState {
    generation: u64,
    domain: Domain,
    seeds_per_patch: usize,
    age_cap: u32,
    real: Vec<bool>,
    age: Vec<u32>,
}

impl SeedBankState {
    /// All-ghost state with every age at the cap.
    pub fn empty(params: &Params, domain: Domain, generation: u64) -> Self {
        let n = domain.len() * params.seeds_per_patch;
        Self {
            generation,
            domain,
            seeds_per_patch: params.seeds_per_patch,
            age_cap: params.age_cap(),
            real: vec![false; n],
            age: vec![params.age_cap(); n],
        }
    }

    /// Builds a state from patch-major compartment arrays; ages above the cap are saturated.
    pub fn from_compartments(params: &Params, generation: u64, domain: Domain, real: Vec<bool>, age: Vec<u32>) -> Self {
        let n = domain.len() * params.seeds_per_patch;
        assert_eq!(real.len(), n, "one type bit per compartment");
        assert_eq!(age.len(), n, "one age per compartment");
        let cap = params.age_cap();
        Self {
            generation,
            domain,
            seeds_per_patch: params.seeds_per_patch,
            age_cap: cap,
            real,
            age: age.into_iter().map(|a| a.min(cap)).collect(),
        }
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn seeds_per_patch(&self) -> usize {
        self.seeds_per_patch
    }

    pub fn age_cap(&self) -> u32 {
        self.age_cap
    }

    pub fn real(&self, idx: usize) -> &[bool] {
        let m = self.seeds_per_patch;
        &self.real[idx * m..(idx + 1) * m]
    }

    pub fn ages(&self, idx: usize) -> &[u32] {
        let m = self.seeds_per_patch;
        &self.age[idx * m..(idx + 1) * m]
    }

    /// Real and not expired.
    #[inline]
    pub fn is_viable(&self, idx: usize, compartment: usize) -> bool {
        let k = idx * self.seeds_per_patch + compartment;
        self.real[k] && self.age[k] < self.age_cap
    }

    /// Sets one compartment of `patch`; panics if the patch is not stored.
    pub fn set(&mut self, patch: i64, compartment: usize, real: bool, age: u32) {
        let idx = self
            .domain
            .index(patch)
            .unwrap_or_else(|| panic!("patch {patch} outside {:?}", self.domain));
        let k = idx * self.seeds_per_patch + compartment;
        self.real[k] = real;
        self.age[k] = age.min(self.age_cap);
    }

    pub fn total_real(&self) -> usize {
        self.real.iter().filter(|&&r| r).count()
    }

    /// Copy re-indexed onto `domain`; new line patches are all-ghost at the age cap.
    pub(crate) fn expanded_to(&self, domain: Domain) -> Self {
        if domain == self.domain {
            return self.clone();
        }
        let m = self.seeds_per_patch;
        let n = domain.len() * m;
        let mut real = vec![false; n];
        let mut age = vec![self.age_cap; n];
        for (old_idx, patch) in self.domain.patches().enumerate() {
            let new_idx = domain.index(patch).expect("expanded domain covers the old one");
            real[new_idx * m..(new_idx + 1) * m].copy_from_slice(self.real(old_idx));
            age[new_idx * m..(new_idx + 1) * m].copy_from_slice(self.ages(old_idx));
        }
        Self {
            generation: self.generation,
            domain,
            seeds_per_patch: m,
            age_cap: self.age_cap,
            real,
            age,
        }
    }

    pub(crate) fn parts_mut(&mut self) -> (&mut Vec<bool>, &mut Vec<u32>) {
        (&mut self.real, &mut self.age)
    }

    pub(crate) fn set_generation(&mut self, generation: u64) {
        self.generation = generation;
    }
}

/// Per stored patch, the number of real compartments with age ≤ H.
pub fn viable_type1_census(state: &SeedBankState) -> Vec<usize> {
    (0..state.domain().len())
        .map(|idx| {
            (0..state.seeds_per_patch())
                .filter(|&j| state.is_viable(idx, j))
                .count()
        })
        .collect()
}

/// Rows `generation,patch,compartment,xi,age`, no header.
pub fn write_state_rows<W: Write>(state: &SeedBankState, out: &mut W) -> io::Result<()> {
    for (idx, patch) in state.domain().patches().enumerate() {
        for (j, (&r, &a)) in state.real(idx).iter().zip(state.ages(idx)).enumerate() {
            writeln!(out, "{},{},{},{},{}", state.generation(), patch, j, r as u8, a)?;
        }
    }
    Ok(())
}

pub const STATE_CSV_HEADER: &str = "generation,patch,compartment,xi,age";
