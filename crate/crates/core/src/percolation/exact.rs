use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Largest width × horizon accepted by [`exact_survival_small`].
pub const ENUMERATION_BUDGET: usize = 30;

/// Whether the reachable set stays non-empty through `horizon` generations for one
/// configuration of extinction bits (`ext` bit `t * width + x` set = site x extinct in
/// the transition into generation t + 1).
///
/// BOA dynamics on `width` sites starting from the centre site at age 0; writes outside
/// the width are dropped.
pub fn survives(max_dormancy: u32, width: usize, horizon: usize, ext: u64) -> bool {
    let full = (1u64 << width) - 1;
    // by_age[a]: occupied sites whose youngest cohort has age a ≤ H
    let mut by_age = vec![0u64; max_dormancy as usize + 1];
    by_age[0] = 1 << (width / 2);
    for t in 0..horizon {
        let reach = by_age.iter().fold(0, |a, &m| a | m);
        let closed = (ext >> (t * width)) & full;
        let sources = reach & !closed;
        let written = (sources | sources << 1 | sources >> 1) & full;
        for a in (1..by_age.len()).rev() {
            by_age[a] = by_age[a - 1] & !written;
        }
        by_age[0] = written;
        if by_age.iter().all(|&m| m == 0) {
            return false;
        }
    }
    true
}

/// Exact probability that some site is reachable at every generation `0..=horizon`
/// when each site is extinct independently with probability `p` per generation.
///
/// Enumerates all 2^(width · horizon) extinction configurations.
pub fn exact_survival_small(max_dormancy: u32, p: &BigRational, width: usize, horizon: usize) -> Result<BigRational> {
    let sites = width * horizon;
    if width == 0 || width > 63 || sites > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            width,
            horizon,
            budget: ENUMERATION_BUDGET,
        });
    }
    // survivors by number of extinct sites
    let mut by_closed = vec![0u64; sites + 1];
    for ext in 0..(1u64 << sites) {
        if survives(max_dormancy, width, horizon, ext) {
            by_closed[ext.count_ones() as usize] += 1;
        }
    }
    let q = BigRational::one() - p;
    let mut total = BigRational::zero();
    for (closed, &count) in by_closed.iter().enumerate() {
        if count == 0 {
            continue;
        }
        let weight = pow(p, closed) * pow(&q, sites - closed);
        total += weight * BigRational::from_integer(BigInt::from(count));
    }
    Ok(total)
}

fn pow(x: &BigRational, n: usize) -> BigRational {
    (0..n).fold(BigRational::one(), |acc, _| acc * x)
}
