//! Goodness-of-fit and interval helpers used by the experiments and tests.

use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete, DiscreteCDF, Hypergeometric};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Pearson chi-square of observed counts against a PMF over the same support.
///
/// Adjacent bins are pooled left to right until each pooled bin expects at least
/// `min_expected` observations; a short remainder joins the last pooled bin.
pub fn chi_square_gof(observed: &[u64], pmf: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), pmf.len());
    let n: u64 = observed.iter().sum();
    let n = n as f64;
    let mut bins: Vec<(f64, f64)> = Vec::new();
    let (mut o, mut e) = (0.0, 0.0);
    for (&obs, &p) in observed.iter().zip(pmf) {
        o += obs as f64;
        e += p * n;
        if e >= min_expected {
            bins.push((o, e));
            o = 0.0;
            e = 0.0;
        }
    }
    if e > 0.0 || o > 0.0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += o;
                last.1 += e;
            }
            None => bins.push((o, e)),
        }
    }
    let statistic = bins.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = bins.len().saturating_sub(1);
    let p_value = if dof == 0 {
        1.0
    } else {
        ChiSquared::new(dof as f64).expect("dof > 0").sf(statistic)
    };
    ChiSquareTest {
        statistic,
        dof,
        p_value,
    }
}

/// Total-variation distance between the empirical law of `observed` and `pmf`.
pub fn total_variation(observed: &[u64], pmf: &[f64]) -> f64 {
    let n: u64 = observed.iter().sum();
    let len = observed.len().max(pmf.len());
    0.5 * (0..len)
        .map(|i| {
            let emp = observed.get(i).map_or(0.0, |&c| c as f64 / n as f64);
            (emp - pmf.get(i).copied().unwrap_or(0.0)).abs()
        })
        .sum::<f64>()
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
pub fn wilson_interval(successes: u64, trials: u64, z: f64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let n = trials as f64;
    let phat = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let centre = (phat + z2 / (2.0 * n)) / denom;
    let half = z * (phat * (1.0 - phat) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    let low = if successes == 0 { 0.0 } else { (centre - half).max(0.0) };
    let high = if successes == trials {
        1.0
    } else {
        (centre + half).min(1.0)
    };
    (low, high)
}

/// 97.5% standard normal quantile.
pub const Z_95: f64 = 1.959_963_984_540_054;

/// PMF over `0..=draws` of the number of marked items among `draws` taken without
/// replacement from `population` items of which `marked` are marked.
pub fn hypergeometric_pmf(population: u64, marked: u64, draws: u64) -> Vec<f64> {
    let dist = Hypergeometric::new(population, marked, draws).expect("valid hypergeometric");
    (0..=draws).map(|x| dist.pmf(x)).collect()
}

/// One-sided sign test: P(Binomial(wins + losses, 1/2) ≥ wins).
pub fn sign_test_p_value(wins: u64, losses: u64) -> f64 {
    let n = wins + losses;
    if wins == 0 {
        return 1.0;
    }
    Binomial::new(0.5, n).expect("valid binomial").sf(wins - 1)
}
