//! Model constants and their validation.

use serde::{Deserialize, Serialize};

use crate::error::{range_err, Error, Result};

/// Spatial arrangement of the patches.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    /// Patches indexed by all of Z; only a finite window is stored.
    #[default]
    Line,
    /// `L` patches with indices taken modulo `L`.
    Torus(usize),
}

/// Unvalidated parameter record, as read from a config document.
///
/// Keys mirror the model symbols (`M`, `H`, `g`, `c`, `p`, `k`, `alpha`).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RawParams {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub seeds_per_patch: Option<u64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub max_dormancy: Option<u64>,
    #[serde(rename = "g", default, skip_serializing_if = "Option::is_none")]
    pub germination: Option<f64>,
    #[serde(rename = "c", default, skip_serializing_if = "Option::is_none")]
    pub colonization: Option<f64>,
    #[serde(rename = "p", default, skip_serializing_if = "Option::is_none")]
    pub extinction: Option<f64>,
    #[serde(rename = "k", default, skip_serializing_if = "Option::is_none")]
    pub parents: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,
}

/// Validated model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params {
    /// M, seed-bank compartments per patch.
    pub seeds_per_patch: usize,
    /// H, maximal dormancy duration in generations.
    pub max_dormancy: u32,
    /// g, germination probability.
    pub germination: f64,
    /// c, potential colonization probability towards each neighbour.
    pub colonization: f64,
    /// p, patch extinction probability.
    pub extinction: f64,
    /// k, potential parents sampled per refilled compartment.
    pub parents: usize,
    pub alpha: Option<f64>,
    pub topology: Topology,
}

impl Params {
    /// ⌊gM⌋, the number of compartments germinating in every patch and generation.
    pub fn germinating(&self) -> usize {
        floor_product(self.germination, self.seeds_per_patch)
    }

    /// Ages are stored saturating at this value; any age above H behaves like H + 1.
    pub fn age_cap(&self) -> u32 {
        self.max_dormancy + 1
    }

    /// Same parameters with a different extinction probability.
    pub fn with_extinction(mut self, p: f64) -> Self {
        self.extinction = p;
        self
    }

    pub fn with_max_dormancy(mut self, h: u32) -> Self {
        self.max_dormancy = h;
        self
    }

    pub fn to_raw(&self) -> RawParams {
        RawParams {
            seeds_per_patch: Some(self.seeds_per_patch as u64),
            max_dormancy: Some(self.max_dormancy as u64),
            germination: Some(self.germination),
            colonization: Some(self.colonization),
            extinction: Some(self.extinction),
            parents: Some(self.parents as u64),
            alpha: self.alpha,
            topology: Some(self.topology),
        }
    }
}

/// ⌊x·n⌋, tolerating the representation error of decimal inputs such as 0.29.
pub(crate) fn floor_product(x: f64, n: usize) -> usize {
    (x * n as f64 + 1e-9).floor() as usize
}

/// ⌈M^alpha⌉ computed so that exact integer powers are not bumped up by rounding.
pub fn parents_for_alpha(seeds_per_patch: usize, alpha: f64) -> u64 {
    let log_target = alpha * (seeds_per_patch as f64).ln();
    let mut k = log_target.exp().ceil();
    if k > 1.0 && (k - 1.0).ln() >= log_target - 1e-12 {
        k -= 1.0;
    }
    k as u64
}

/// Checks every bound on the raw record and resolves `k` from `alpha` when set.
pub fn validate_params(raw: &RawParams) -> Result<Params> {
    let m = raw
        .seeds_per_patch
        .ok_or_else(|| range_err("M", "missing", "a positive integer"))?;
    if m < 1 {
        return Err(range_err("M", m, "M >= 1"));
    }
    let h = raw
        .max_dormancy
        .ok_or_else(|| range_err("H", "missing", "a non-negative integer"))?;
    if h >= u32::MAX as u64 / 2 {
        return Err(range_err("H", h, "H < 2^31"));
    }
    let g = raw
        .germination
        .ok_or_else(|| range_err("g", "missing", "a real in (0,1)"))?;
    if !(g > 0.0 && g < 1.0) {
        return Err(range_err("g", g, "0 < g < 1"));
    }
    let c = raw
        .colonization
        .ok_or_else(|| range_err("c", "missing", "a real in (0,1/2)"))?;
    if !(c > 0.0 && c < 0.5) {
        return Err(range_err("c", c, "0 < c < 1/2"));
    }
    let p = raw
        .extinction
        .ok_or_else(|| range_err("p", "missing", "a real in [0,1]"))?;
    if !(0.0..=1.0).contains(&p) {
        return Err(range_err("p", p, "0 <= p <= 1"));
    }
    let m = m as usize;
    let germinating = floor_product(g, m);
    if germinating < 1 {
        return Err(range_err(
            "g",
            g,
            format!("floor(g*M) >= 1 (got floor({g}*{m}) = {germinating})"),
        ));
    }

    let k = match (raw.alpha, raw.parents) {
        (Some(alpha), explicit) => {
            if alpha.is_nan() || alpha <= 1.0 || alpha.is_infinite() {
                return Err(range_err("alpha", alpha, "alpha > 1"));
            }
            let k = parents_for_alpha(m, alpha);
            if let Some(explicit) = explicit {
                if explicit != k {
                    return Err(range_err(
                        "k",
                        explicit,
                        format!("k = ceil(M^alpha) = {k} when alpha is set"),
                    ));
                }
            }
            k
        }
        (None, Some(k)) => k,
        (None, None) => {
            return Err(range_err("k", "missing", "an integer k >= 2 (or alpha > 1)"));
        }
    };
    if k <= 1 {
        return Err(Error::DegenerateK(k));
    }

    let topology = raw.topology.unwrap_or_default();
    if let Topology::Torus(len) = topology {
        if len == 0 {
            return Err(range_err("topology", "torus(0)", "torus length L >= 1"));
        }
    }

    Ok(Params {
        seeds_per_patch: m,
        max_dormancy: h as u32,
        germination: g,
        colonization: c,
        extinction: p,
        parents: k as usize,
        alpha: raw.alpha,
        topology,
    })
}
