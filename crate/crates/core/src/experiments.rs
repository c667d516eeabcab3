//! Replicated runs behind the command-line harnesses: invasion from a few seeded
//! patches, occupancy/BOA agreement as M grows, the threshold curve and the
//! offspring-law check.
//!
//! Replicate `r` of a run with base seed `s` uses `replicate_seed(s, r)`, so runs that
//! differ only in H or p share every random stream. Replicates run on the current
//! rayon pool and are collected in order; output does not depend on the thread count.

use std::io::{self, Write};

use rayon::prelude::*;

use crate::error::Result;
use crate::extinction::sample_extinction_field;
use crate::occupancy::{coupled_run, make_theorem1_initial, DeviationEvent, InitialOccupancy};
use crate::params::{parents_for_alpha, validate_params, Params, Topology};
use crate::percolation::{pcrit_scan, PercConfig, ScanResult};
use crate::rng::replicate_seed;
use crate::stats::{chi_square_gof, total_variation, wilson_interval, ChiSquareTest, Z_95};
use crate::wfsb::{isolated_offspring_law, refill_compartment, wfsb_step, OffspringLaw, ParentDraws, ParentPatch};

/// `count` consecutive patches starting at `first`, each holding ⌊gM⌋ real seeds of
/// age `age`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeededBlock {
    pub first: i64,
    pub count: usize,
    pub age: u32,
}

impl Default for SeededBlock {
    fn default() -> Self {
        Self {
            first: 0,
            count: 5,
            age: 0,
        }
    }
}

impl SeededBlock {
    fn occupancy(&self, params: &Params) -> InitialOccupancy {
        InitialOccupancy::block(params.topology, self.first, self.count, self.age, params.germination)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvasionSpec {
    pub params: Params,
    pub replicates: usize,
    pub generations: u64,
    pub seed: u64,
    pub init: SeededBlock,
}

/// Per replicate and generation, densities of viable and expired real seeds over all
/// L·M compartments, plus the first generation without a viable seed.
#[derive(Debug, Clone, PartialEq)]
pub struct DensitySeries {
    pub viable: Vec<Vec<f64>>,
    pub expired: Vec<Vec<f64>>,
    pub extinction_generation: Vec<Option<u64>>,
}

impl DensitySeries {
    pub fn survivors(&self) -> usize {
        self.extinction_generation.iter().filter(|e| e.is_none()).count()
    }

    /// Rows `replicate,generation,viable_density,expired_density,extinct`.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "replicate,generation,viable_density,expired_density,extinct")?;
        for (r, (viable, expired)) in self.viable.iter().zip(&self.expired).enumerate() {
            let ext = self.extinction_generation[r];
            for (n, (v, e)) in viable.iter().zip(expired).enumerate() {
                let gone = ext.is_some_and(|g| n as u64 >= g);
                writeln!(out, "{r},{n},{v},{e},{}", gone as u8)?;
            }
        }
        Ok(())
    }
}

fn densities(state: &crate::wfsb::SeedBankState) -> (usize, usize) {
    let (mut viable, mut expired) = (0, 0);
    for idx in 0..state.domain().len() {
        for (j, &r) in state.real(idx).iter().enumerate() {
            if r {
                if state.is_viable(idx, j) {
                    viable += 1;
                } else {
                    expired += 1;
                }
            }
        }
    }
    (viable, expired)
}

fn invasion_replicate(spec: &InvasionSpec, seed: u64) -> Result<(Vec<f64>, Vec<f64>, Option<u64>)> {
    let params = &spec.params;
    let mut state = make_theorem1_initial(params, &spec.init.occupancy(params), seed)?;
    let total = (state.domain().len() * params.seeds_per_patch) as f64;
    let mut viable = Vec::with_capacity(spec.generations as usize + 1);
    let mut expired = Vec::with_capacity(spec.generations as usize + 1);
    let mut extinct_at = None;
    for n in 0..=spec.generations {
        if n > 0 {
            if state.total_real() == 0 {
                viable.push(0.0);
                expired.push(0.0);
                continue;
            }
            let ext = sample_extinction_field(params, n, state.domain().expanded(), seed);
            state = wfsb_step(&state, params, &ext, seed)?;
        }
        let (v, e) = densities(&state);
        if v == 0 && extinct_at.is_none() {
            extinct_at = Some(n);
        }
        viable.push(v as f64 / total);
        expired.push(e as f64 / total);
    }
    Ok((viable, expired, extinct_at))
}

/// Seed-bank runs from a block of seeded patches, recording seed densities.
pub fn run_invasion(spec: &InvasionSpec) -> Result<DensitySeries> {
    let results: Vec<_> = (0..spec.replicates as u64)
        .into_par_iter()
        .map(|r| invasion_replicate(spec, replicate_seed(spec.seed, r)))
        .collect::<Result<_>>()?;
    let mut series = DensitySeries {
        viable: Vec::with_capacity(results.len()),
        expired: Vec::with_capacity(results.len()),
        extinction_generation: Vec::with_capacity(results.len()),
    };
    for (v, e, x) in results {
        series.viable.push(v);
        series.expired.push(e);
        series.extinction_generation.push(x);
    }
    Ok(series)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceSpec {
    /// Template; M and k are replaced per entry of `sizes` (k = ⌈M^α⌉).
    pub params: Params,
    pub sizes: Vec<usize>,
    pub replicates: usize,
    pub generations: u64,
    pub seed: u64,
    pub init: SeededBlock,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub seeds_per_patch: usize,
    pub parents: usize,
    pub replicates: usize,
    pub agreeing: usize,
    pub fraction: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

pub const CONVERGENCE_CSV_HEADER: &str = "M,k,replicates,no_deviation,fraction,ci_low,ci_high";

impl ConvergenceRow {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{}",
            self.seeds_per_patch,
            self.parents,
            self.replicates,
            self.agreeing,
            self.fraction,
            self.ci_low,
            self.ci_high
        )
    }
}

/// Fraction of coupled runs whose occupancy never differs from the BOA process, per M.
pub fn run_convergence(spec: &ConvergenceSpec) -> Result<Vec<ConvergenceRow>> {
    let alpha = spec
        .params
        .alpha
        .ok_or_else(|| crate::error::range_err("alpha", "unset", "> 1"))?;
    spec.sizes
        .iter()
        .map(|&m| {
            let mut raw = spec.params.to_raw();
            raw.seeds_per_patch = Some(m as u64);
            raw.parents = Some(parents_for_alpha(m, alpha));
            let params = validate_params(&raw)?;
            let agree: Vec<bool> = (0..spec.replicates as u64)
                .into_par_iter()
                .map(|r| {
                    let seed = replicate_seed(spec.seed, r);
                    let init = make_theorem1_initial(&params, &spec.init.occupancy(&params), seed)?;
                    let run = coupled_run(&params, &init, spec.generations, seed)?;
                    Ok(!run.report.fired(DeviationEvent::DiffBoa))
                })
                .collect::<Result<_>>()?;
            let agreeing = agree.iter().filter(|&&a| a).count();
            let (ci_low, ci_high) = wilson_interval(agreeing as u64, spec.replicates as u64, Z_95);
            Ok(ConvergenceRow {
                seeds_per_patch: m,
                parents: params.parents,
                replicates: spec.replicates,
                agreeing,
                fraction: agreeing as f64 / spec.replicates.max(1) as f64,
                ci_low,
                ci_high,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdCurve {
    pub scans: Vec<ScanResult>,
    /// Estimates non-decreasing in H.
    pub monotone: bool,
}

/// One threshold scan per H (sorted, deduplicated), all with the same uniforms.
pub fn run_threshold_curve(base: &PercConfig, dormancies: &[u32]) -> Result<ThresholdCurve> {
    let mut hs = dormancies.to_vec();
    hs.sort_unstable();
    hs.dedup();
    let scans: Vec<ScanResult> = hs
        .par_iter()
        .map(|&h| {
            pcrit_scan(&PercConfig {
                max_dormancy: h,
                ..base.clone()
            })
        })
        .collect::<Result<_>>()?;
    let monotone = scans.windows(2).all(|w| w[0].estimate <= w[1].estimate);
    Ok(ThresholdCurve { scans, monotone })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OffspringReport {
    pub law: OffspringLaw,
    /// Replicates with each offspring count `0..=3⌊gM⌋`.
    pub counts: Vec<u64>,
    pub chi_square: ChiSquareTest,
    pub total_variation: f64,
    pub mean: f64,
}

/// Offspring of one viable plant, alone in patch 0 among ghost plants: the number of
/// the 3⌊gM⌋ refilled compartments of patches −1, 0, 1 that become real.
fn isolated_offspring(params: &Params, seed: u64) -> usize {
    let gm = params.germinating();
    let mut focal = vec![false; gm];
    focal[0] = true;
    let none = vec![false; gm];
    let focal = ParentPatch::new(false, &focal);
    let empty = ParentPatch::new(false, &none);
    let mut offspring = 0;
    for (patch, hood) in [
        (-1i64, [empty, empty, focal]),
        (0, [empty, focal, empty]),
        (1, [focal, empty, empty]),
    ] {
        for j in 0..gm {
            let mut draws = ParentDraws::new(seed, 1, patch, j, params);
            offspring += refill_compartment(params, &mut draws, &hood) as usize;
        }
    }
    offspring
}

/// Simulated offspring counts of an isolated plant against the three-binomial law.
/// Extinction is ignored (p = 0).
pub fn run_offspring_test(params: &Params, replicates: usize, seed: u64) -> OffspringReport {
    let law = isolated_offspring_law(params);
    let samples: Vec<usize> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| isolated_offspring(params, replicate_seed(seed, r)))
        .collect();
    let mut counts = vec![0u64; law.pmf.len()];
    for s in &samples {
        counts[*s] += 1;
    }
    let mean = samples.iter().sum::<usize>() as f64 / replicates.max(1) as f64;
    OffspringReport {
        chi_square: chi_square_gof(&counts, &law.pmf, 5.0),
        total_variation: total_variation(&counts, &law.pmf),
        counts,
        law,
        mean,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompetitionReport {
    pub replicates: usize,
    pub mean: f64,
    pub std_error: f64,
}

/// Patches −1, 0, 1 full of viable plants: each refilled compartment is credited to
/// its first potential parent. Returns the mean offspring per plant of patch 0.
pub fn run_max_competition(params: &Params, replicates: usize, seed: u64) -> CompetitionReport {
    let gm = params.germinating();
    let per_rep: Vec<f64> = (0..replicates as u64)
        .into_par_iter()
        .map(|r| {
            let seed = replicate_seed(seed, r);
            let mut to_focal = 0usize;
            for patch in -1i64..=1 {
                for j in 0..gm {
                    let mut draws = ParentDraws::new(seed, 1, patch, j, params);
                    if patch + draws.offset(0) as i64 == 0 {
                        to_focal += 1;
                    }
                }
            }
            to_focal as f64 / gm as f64
        })
        .collect();
    let n = per_rep.len().max(1) as f64;
    let mean = per_rep.iter().sum::<f64>() / n;
    let var = per_rep.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    CompetitionReport {
        replicates,
        mean,
        std_error: (var / n).sqrt(),
    }
}

/// The invasion setup on a torus of `len` patches: (M, g, c, k) = (100, 0.5, 0.05, 25).
pub fn invasion_params(len: usize, max_dormancy: u32, extinction: f64) -> Params {
    validate_params(&crate::params::RawParams {
        seeds_per_patch: Some(100),
        max_dormancy: Some(max_dormancy as u64),
        germination: Some(0.5),
        colonization: Some(0.05),
        extinction: Some(extinction),
        parents: Some(25),
        alpha: None,
        topology: Some(Topology::Torus(len)),
    })
    .expect("valid invasion parameters")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn certain_extinction_ends_invasion_within_h_plus_one() {
        for h in 0..3 {
            let spec = InvasionSpec {
                params: invasion_params(20, h, 1.0),
                replicates: 4,
                generations: 10,
                seed: 1,
                init: SeededBlock::default(),
            };
            let s = run_invasion(&spec).unwrap();
            for (r, x) in s.extinction_generation.iter().enumerate() {
                assert!(x.unwrap() <= h as u64 + 1);
                assert_eq!(s.viable[r].len(), 11);
                assert!(s.viable[r][x.unwrap() as usize..].iter().all(|&v| v == 0.0));
            }
        }
    }

    #[test]
    fn initial_density_is_seeded_fraction() {
        let spec = InvasionSpec {
            params: invasion_params(200, 1, 0.5),
            replicates: 2,
            generations: 0,
            seed: 3,
            init: SeededBlock::default(),
        };
        let s = run_invasion(&spec).unwrap();
        assert_eq!(s.viable[0], vec![250.0 / 20_000.0]);
        assert_eq!(s.expired[0], vec![0.0]);
    }

    #[test]
    fn zero_generations_always_agree() {
        let mut params = invasion_params(10, 1, 0.5);
        params.alpha = Some(1.5);
        params.topology = Topology::Line;
        let spec = ConvergenceSpec {
            params,
            sizes: vec![4, 10],
            replicates: 20,
            generations: 0,
            seed: 0,
            init: SeededBlock::default(),
        };
        for row in run_convergence(&spec).unwrap() {
            assert_eq!(row.fraction, 1.0);
        }
    }

    #[test]
    fn tiny_offspring_law_matches_simulation() {
        let params = validate_params(&crate::params::RawParams {
            seeds_per_patch: Some(2),
            max_dormancy: Some(0),
            germination: Some(0.5),
            colonization: Some(0.25),
            extinction: Some(0.0),
            parents: Some(2),
            ..Default::default()
        })
        .unwrap();
        let report = run_offspring_test(&params, 20_000, 5);
        assert!(report.chi_square.p_value > 0.001, "{:?}", report.chi_square);
        assert!(report.total_variation < 0.02);
    }
}
