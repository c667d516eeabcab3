use crate::error::{Error, Result};
use crate::extinction::ExtinctionField;
use crate::lattice::Domain;
use crate::wfsb::SeedBankState;

/// Per-patch (O, h) pairs, the state space shared by the occupancy and BOA processes.
///
/// `h` saturates at H + 1. Patches outside a line window are (O = 0, h = min(n, H + 1)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpomState {
    generation: u64,
    domain: Domain,
    age_cap: u32,
    occupied: Vec<bool>,
    age: Vec<u32>,
}

/// Occupancy process view of a seed-bank trajectory.
pub type OccupancyState = SpomState;
/// Best Occupancy Achievable process state.
pub type BoaState = SpomState;

impl SpomState {
    pub fn new(generation: u64, domain: Domain, age_cap: u32, occupied: Vec<bool>, age: Vec<u32>) -> Self {
        assert_eq!(occupied.len(), domain.len());
        assert_eq!(age.len(), domain.len());
        Self {
            generation,
            domain,
            age_cap,
            occupied,
            age: age.into_iter().map(|a| a.min(age_cap)).collect(),
        }
    }

    /// Every patch of `domain` occupied iff listed in `reachable`, all at age 0.
    pub fn with_reachable(domain: Domain, age_cap: u32, reachable: &[i64]) -> Self {
        let occupied = domain.patches().map(|p| reachable.contains(&p)).collect();
        Self::new(0, domain, age_cap, occupied, vec![0; domain.len()])
    }

    pub fn generation(&self) -> u64 {
        self.generation
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn age_cap(&self) -> u32 {
        self.age_cap
    }

    pub fn occupied(&self) -> &[bool] {
        &self.occupied
    }

    pub fn ages(&self) -> &[u32] {
        &self.age
    }

    fn exterior_age(&self) -> u32 {
        self.generation.min(self.age_cap as u64) as u32
    }

    /// (O, h) of any patch, including the implicit exterior of a line window.
    pub fn get(&self, patch: i64) -> (bool, u32) {
        match self.domain.index(patch) {
            Some(i) => (self.occupied[i], self.age[i]),
            None => (false, self.exterior_age()),
        }
    }

    /// O = 1 and h ≤ H.
    pub fn is_reachable(&self, patch: i64) -> bool {
        let (o, h) = self.get(patch);
        o && h < self.age_cap
    }

    pub fn reachable_patches(&self) -> Vec<i64> {
        self.domain.patches().filter(|&p| self.is_reachable(p)).collect()
    }

    pub fn any_reachable(&self) -> bool {
        (0..self.domain.len()).any(|i| self.occupied[i] && self.age[i] < self.age_cap)
    }
}

/// (O, h) per patch of a seed-bank state: O = 1 iff some compartment holds a real seed
/// (any age), h = youngest such age, otherwise the previous h + 1 (0 at generation 0).
pub fn derive_occupancy(state: &SeedBankState, previous: Option<&OccupancyState>) -> Result<OccupancyState> {
    let generation = state.generation();
    if generation > 0 && previous.is_none() {
        return Err(Error::MissingPrevious(generation));
    }
    let cap = state.age_cap();
    let domain = *state.domain();
    let mut occupied = Vec::with_capacity(domain.len());
    let mut age = Vec::with_capacity(domain.len());
    for (idx, patch) in domain.patches().enumerate() {
        let youngest = state
            .real(idx)
            .iter()
            .zip(state.ages(idx))
            .filter(|(&r, _)| r)
            .map(|(_, &a)| a)
            .min();
        match youngest {
            Some(a) => {
                occupied.push(true);
                age.push(a);
            }
            None => {
                occupied.push(false);
                age.push(match previous {
                    Some(prev) if generation > 0 => (prev.get(patch).1 + 1).min(cap),
                    _ => 0,
                });
            }
        }
    }
    Ok(SpomState::new(generation, domain, cap, occupied, age))
}

/// One BOA generation: every reachable, non-extinct patch marks itself and both
/// neighbours (O = 1, h = 0); untouched patches keep O and age by one.
pub fn boa_step(state: &BoaState, ext: &ExtinctionField) -> Result<BoaState> {
    let next_gen = state.generation + 1;
    if ext.generation() != next_gen {
        return Err(Error::WindowMismatch(format!(
            "extinction field is for generation {}, BOA transition needs {next_gen}",
            ext.generation()
        )));
    }
    let domain = state.domain.expanded();
    if !ext.domain().covers(&domain) {
        return Err(Error::WindowMismatch(format!(
            "extinction field over {:?} does not cover {domain:?}",
            ext.domain()
        )));
    }
    let cap = state.age_cap;
    let mut occupied = Vec::with_capacity(domain.len());
    let mut age = Vec::with_capacity(domain.len());
    for patch in domain.patches() {
        let (o, h) = state.get(patch);
        let written = (-1..=1).any(|d| {
            let src = patch + d;
            state.is_reachable(src) && !ext.is_extinct(src).unwrap_or(true)
        });
        if written {
            occupied.push(true);
            age.push(0);
        } else {
            occupied.push(o);
            age.push((h + 1).min(cap));
        }
    }
    Ok(SpomState::new(next_gen, domain, cap, occupied, age))
}
