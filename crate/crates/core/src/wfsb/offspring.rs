use statrs::distribution::{Binomial, Discrete};

use crate::params::Params;

/// Offspring count of a real plant isolated among ghosts: the sum of one
/// Binomial(⌊gM⌋, q_center) and two Binomial(⌊gM⌋, q_side).
#[derive(Debug, Clone, PartialEq)]
pub struct OffspringLaw {
    pub trials: usize,
    pub q_center: f64,
    pub q_side: f64,
    /// Probability of each count in `0..=3·trials`.
    pub pmf: Vec<f64>,
}

/// 1 - (1 - x)^k without cancellation for small x.
fn hit_probability(x: f64, k: usize) -> f64 {
    -((k as f64) * (-x).ln_1p()).exp_m1()
}

fn binomial_pmf(n: usize, q: f64) -> Vec<f64> {
    let dist = Binomial::new(q, n as u64).expect("q in [0,1]");
    (0..=n as u64).map(|x| dist.pmf(x)).collect()
}

fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

pub fn isolated_offspring_law(params: &Params) -> OffspringLaw {
    let n = params.germinating();
    let k = params.parents;
    let c = params.colonization;
    let q_center = hit_probability((1.0 - 2.0 * c) / n as f64, k);
    let q_side = hit_probability(c / n as f64, k);
    let center = binomial_pmf(n, q_center);
    let side = binomial_pmf(n, q_side);
    let pmf = convolve(&convolve(&center, &side), &side);
    OffspringLaw {
        trials: n,
        q_center,
        q_side,
        pmf,
    }
}

impl OffspringLaw {
    pub fn mean(&self) -> f64 {
        self.trials as f64 * (self.q_center + 2.0 * self.q_side)
    }

    pub fn pmf_mean(&self) -> f64 {
        self.pmf.iter().enumerate().map(|(x, p)| x as f64 * p).sum()
    }
}
