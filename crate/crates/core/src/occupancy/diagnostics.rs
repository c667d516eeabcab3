use rand::RngCore;

use crate::error::{Error, Result};
use crate::lattice::{Domain, Window};
use crate::params::{floor_product, Params, Topology};
use crate::rng::{derive_stream, unit_f64, RngKey, Role};
use crate::wfsb::SeedBankState;

/// Number of compartments of the patch in slot `idx` at each age `0..=H+1`
/// (real and ghost alike).
pub fn age_census(state: &SeedBankState, idx: usize) -> Vec<usize> {
    let mut counts = vec![0; state.age_cap() as usize + 1];
    for &a in state.ages(idx) {
        counts[a as usize] += 1;
    }
    counts
}

/// a_0 = 0, a_{h+1} = 3 a_h + 1.
pub fn a_sequence(h: u32) -> f64 {
    (0..h).fold(0.0, |a, _| 3.0 * a + 1.0)
}

/// Admissible range for the size of the cohort of age `h`:
/// ⌊gM⌋((1 - ⌊gM⌋/M)^h ∓ ε a_h).
pub fn window_w(params: &Params, h: u32, epsilon: f64) -> (f64, f64) {
    let gm = params.germinating() as f64;
    let survive = (1.0 - gm / params.seeds_per_patch as f64).powi(h as i32);
    let spread = epsilon * a_sequence(h);
    (gm * (survive - spread), gm * (survive + spread))
}

/// Half the largest ε for which every cohort window keeps at least one seed
/// through age H; `None` when no positive ε qualifies.
pub fn default_epsilon(params: &Params) -> Option<f64> {
    let h = params.max_dormancy;
    if h == 0 {
        return Some(0.5);
    }
    let gm = params.germinating() as f64;
    let slack = (1.0 - gm / params.seeds_per_patch as f64).powi(h as i32) - 1.0 / gm;
    (slack > 0.0).then(|| 0.5 * slack / a_sequence(h))
}

/// Upper bound on the probability that some plant of the neighbourhood is never drawn
/// by some compartment: 3 g² M² (1 - c*/(gM))^(M^α), c* = min(c, 1 - 2c).
/// `None` when α is unset.
pub fn par_bound(params: &Params) -> Option<f64> {
    let alpha = params.alpha?;
    let m = params.seeds_per_patch as f64;
    let g = params.germination;
    let c = params.colonization;
    let cstar = c.min(1.0 - 2.0 * c);
    let log_miss = m.powf(alpha) * (-cstar / (g * m)).ln_1p();
    Some(3.0 * g * g * m * m * log_miss.exp())
}

/// Occupancy of one patch in an initial condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchSpec {
    pub occupied: bool,
    /// Age of the real cohort (must be 0 when unoccupied).
    pub age: u32,
    /// Fraction g_i of compartments holding that cohort.
    pub fraction: f64,
}

impl PatchSpec {
    pub const EMPTY: PatchSpec = PatchSpec {
        occupied: false,
        age: 0,
        fraction: 1.0,
    };
}

/// Initial occupancy: one spec per patch of `domain`, in slot order.
#[derive(Debug, Clone, PartialEq)]
pub struct InitialOccupancy {
    pub domain: Domain,
    pub patches: Vec<PatchSpec>,
}

impl InitialOccupancy {
    /// `count` consecutive occupied patches starting at `first`, all with the same
    /// cohort age and fraction. On a line the domain is exactly the block.
    pub fn block(topology: Topology, first: i64, count: usize, age: u32, fraction: f64) -> Self {
        let window = Window::new(first, first + count as i64 - 1);
        let domain = Domain::for_topology(topology, window);
        let mut occupied = vec![false; domain.len()];
        for patch in window.i_min..=window.i_max {
            occupied[domain.index(patch).expect("block inside domain")] = true;
        }
        let patches = occupied
            .into_iter()
            .map(|o| {
                if o {
                    PatchSpec {
                        occupied: true,
                        age,
                        fraction,
                    }
                } else {
                    PatchSpec::EMPTY
                }
            })
            .collect();
        Self { domain, patches }
    }
}

/// Seed bank matching an occupancy specification: unoccupied patches hold only
/// ghosts, occupied patch i holds exactly ⌊g_i M⌋ real seeds, all of age h_i, and the
/// other compartments are ghosts with ages drawn from the stationary profile
/// P(a) ∝ (1 - ⌊gM⌋/M)^a, the tail pooled at H + 1.
pub fn make_theorem1_initial(params: &Params, init: &InitialOccupancy, seed: u64) -> Result<SeedBankState> {
    let domain = init.domain;
    if init.patches.len() != domain.len() {
        return Err(Error::SpecViolation(format!(
            "{} patch specs for a domain of {} patches",
            init.patches.len(),
            domain.len()
        )));
    }
    let m = params.seeds_per_patch;
    let cap = params.age_cap();
    let f = params.germinating() as f64 / m as f64;
    // cumulative stationary weights over ages 0..=cap
    let mut cdf = Vec::with_capacity(cap as usize + 1);
    let mut acc = 0.0;
    for a in 0..cap {
        acc += f * (1.0 - f).powi(a as i32);
        cdf.push(acc);
    }
    cdf.push(f64::INFINITY);

    let mut real = vec![false; domain.len() * m];
    let mut age = vec![cap; domain.len() * m];
    for (idx, (patch, spec)) in domain.patches().zip(&init.patches).enumerate() {
        let cohort = if spec.occupied {
            if !(spec.fraction > 0.0 && spec.fraction <= 1.0) {
                return Err(Error::SpecViolation(format!(
                    "patch {patch}: fraction {} outside (0, 1]",
                    spec.fraction
                )));
            }
            let n = floor_product(spec.fraction, m);
            if n == 0 {
                return Err(Error::SpecViolation(format!(
                    "patch {patch}: fraction {} leaves no real seed among {m} compartments",
                    spec.fraction
                )));
            }
            n
        } else {
            if spec.age != 0 {
                return Err(Error::SpecViolation(format!(
                    "patch {patch}: unoccupied patch with age {}",
                    spec.age
                )));
            }
            0
        };
        let base = idx * m;
        for j in 0..cohort {
            real[base + j] = true;
            age[base + j] = spec.age.min(cap);
        }
        if cohort < m {
            let mut rng = derive_stream(RngKey::new(seed, 0, patch, Role::InitCondition, 0));
            for j in cohort..m {
                let u = unit_f64(rng.next_u64());
                age[base + j] = cdf.iter().position(|&c| u < c).unwrap_or(cap as usize) as u32;
            }
        }
    }
    Ok(SeedBankState::from_compartments(params, 0, domain, real, age))
}
