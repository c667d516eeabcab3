use std::io::{self, Write};

use super::diagnostics::{age_census, default_epsilon, window_w};
use super::spom::{boa_step, derive_occupancy, BoaState, OccupancyState, SpomState};
use crate::error::{Error, Result};
use crate::extinction::{sample_extinction_field, ExtinctionField};
use crate::params::Params;
use crate::wfsb::{covers_all_plants, step_with_germination, ParentDraws, SeedBankState};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum DeviationEvent {
    DiffBoa,
    Par,
    ErrG,
    ErrF,
}

impl DeviationEvent {
    pub const ALL: [DeviationEvent; 4] = [Self::DiffBoa, Self::Par, Self::ErrG, Self::ErrF];

    pub fn label(self) -> &'static str {
        match self {
            Self::DiffBoa => "DiffBOA",
            Self::Par => "Par",
            Self::ErrG => "ErrG",
            Self::ErrF => "ErrF",
        }
    }
}

/// Patches on which each event fired, per generation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GenerationEvents {
    pub generation: u64,
    pub diff_boa: Vec<i64>,
    pub par: Vec<i64>,
    pub err_g: Vec<i64>,
    pub err_f: Vec<i64>,
}

impl GenerationEvents {
    pub fn patches(&self, event: DeviationEvent) -> &[i64] {
        match event {
            DeviationEvent::DiffBoa => &self.diff_boa,
            DeviationEvent::Par => &self.par,
            DeviationEvent::ErrG => &self.err_g,
            DeviationEvent::ErrF => &self.err_f,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct DeviationReport {
    /// ε used for the cohort windows; `None` when ErrF was not evaluated.
    pub epsilon: Option<f64>,
    /// Indexed by generation.
    pub generations: Vec<GenerationEvents>,
}

impl DeviationReport {
    pub fn fired(&self, event: DeviationEvent) -> bool {
        self.generations.iter().any(|g| !g.patches(event).is_empty())
    }

    pub fn first(&self, event: DeviationEvent) -> Option<u64> {
        self.generations
            .iter()
            .find(|g| !g.patches(event).is_empty())
            .map(|g| g.generation)
    }

    pub fn count(&self, event: DeviationEvent) -> usize {
        self.generations.iter().map(|g| g.patches(event).len()).sum()
    }

    /// Rows `generation,patch,event` with events in DiffBOA, Par, ErrG, ErrF order.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> io::Result<()> {
        writeln!(out, "generation,patch,event")?;
        for g in &self.generations {
            for ev in DeviationEvent::ALL {
                for p in g.patches(ev) {
                    writeln!(out, "{},{},{}", g.generation, p, ev.label())?;
                }
            }
        }
        Ok(())
    }
}

/// Seed bank, occupancy and BOA trajectories driven by the same extinction fields.
#[derive(Debug, Clone)]
pub struct CoupledRun {
    pub seed: u64,
    pub seedbank: Vec<SeedBankState>,
    pub occupancy: Vec<OccupancyState>,
    pub boa: Vec<BoaState>,
    /// `extinction[n]` drives the transition n -> n+1.
    pub extinction: Vec<ExtinctionField>,
    /// `germination[n][slot]`: germinating compartments of each patch of the domain
    /// at n + 1 during the transition n -> n+1.
    pub germination: Vec<Vec<Vec<usize>>>,
    /// DiffBOA only; see [`deviation_scan`] for the other events.
    pub report: DeviationReport,
}

fn check_coupling(occ: &OccupancyState, boa: &BoaState) -> Result<Vec<i64>> {
    let mut diff = Vec::new();
    for patch in occ.domain().patches() {
        let (o_k, h_k) = occ.get(patch);
        let (o_boa, h_boa) = boa.get(patch);
        if (o_k && !o_boa) || h_k < h_boa {
            return Err(Error::CouplingViolation {
                generation: occ.generation(),
                patch,
                o_k,
                h_k,
                o_boa,
                h_boa,
            });
        }
        if o_k != o_boa || h_k != h_boa {
            diff.push(patch);
        }
    }
    Ok(diff)
}

/// Runs `generations` steps of the seed bank from `init` together with the BOA process
/// started from the initial occupancy, both under one extinction field per generation.
///
/// Fails with [`Error::CouplingViolation`] if occupancy ever exceeds the BOA bound.
pub fn coupled_run(params: &Params, init: &SeedBankState, generations: u64, seed: u64) -> Result<CoupledRun> {
    let occ0 = derive_occupancy(init, None)?;
    let mut run = CoupledRun {
        seed,
        seedbank: vec![init.clone()],
        occupancy: vec![occ0.clone()],
        boa: vec![occ0],
        extinction: Vec::with_capacity(generations as usize),
        germination: Vec::with_capacity(generations as usize),
        report: DeviationReport {
            epsilon: None,
            generations: vec![GenerationEvents {
                generation: init.generation(),
                ..Default::default()
            }],
        },
    };
    for _ in 0..generations {
        let state = run.seedbank.last().expect("non-empty");
        let next_gen = state.generation() + 1;
        let ext = sample_extinction_field(params, next_gen, state.domain().expanded(), seed);
        let (next, germ) = step_with_germination(state, params, &ext, seed)?;
        let occ = derive_occupancy(&next, run.occupancy.last())?;
        let boa = boa_step(run.boa.last().expect("non-empty"), &ext)?;
        let diff = check_coupling(&occ, &boa)?;
        run.report.generations.push(GenerationEvents {
            generation: next_gen,
            diff_boa: diff,
            ..Default::default()
        });
        run.seedbank.push(next);
        run.occupancy.push(occ);
        run.boa.push(boa);
        run.extinction.push(ext);
        run.germination.push(germ);
    }
    Ok(run)
}

/// Evaluates every deviation event along a coupled run.
///
/// Par at n: some compartment germinating in the transition n -> n+1 misses a plant of
/// its neighbourhood among its k draws. ErrG at n: the youngest cohort of an occupied
/// patch with h ≤ H has no germinating seed. ErrF at n: the size of that cohort lies
/// outside its window. ErrG and ErrF only consider patches holding real seeds.
/// `epsilon` defaults to [`default_epsilon`]; with neither, ErrF is not evaluated.
pub fn deviation_scan(run: &CoupledRun, params: &Params, epsilon: Option<f64>) -> DeviationReport {
    let epsilon = epsilon.or_else(|| default_epsilon(params));
    let mut report = run.report.clone();
    report.epsilon = epsilon;
    let h_max = params.max_dormancy;
    for (n, occ) in run.occupancy.iter().enumerate() {
        let state = &run.seedbank[n];
        let events = &mut report.generations[n];
        events.par.clear();
        events.err_g.clear();
        events.err_f.clear();
        let transition = run.germination.get(n);
        for (idx, patch) in occ.domain().patches().enumerate() {
            let (o, h) = occ.get(patch);
            if !o || h > h_max {
                continue;
            }
            let census = age_census(state, idx);
            if let Some(eps) = epsilon {
                let (lo, hi) = window_w(params, h, eps);
                let size = census[h as usize] as f64;
                if size < lo - 1e-9 || size > hi + 1e-9 {
                    events.err_f.push(patch);
                }
            }
            if let Some(germ) = transition {
                let slot = run.seedbank[n + 1].domain().index(patch).expect("domain grows");
                if germ[slot].iter().all(|&j| state.ages(idx)[j] != h) {
                    events.err_g.push(patch);
                }
            }
        }
        if let Some(germ) = transition {
            let next = &run.seedbank[n + 1];
            for (slot, patch) in next.domain().patches().enumerate() {
                let missed = germ[slot].iter().any(|&j| {
                    let mut draws = ParentDraws::new(run.seed, n as u64 + 1, patch, j, params);
                    !covers_all_plants(params, &mut draws)
                });
                if missed {
                    events.par.push(patch);
                }
            }
        }
    }
    report
}

pub const TRAJECTORY_CSV_HEADER: &str = "generation,patch,O_k,h_k,O_boa,h_boa,diff_flag";

/// Rows `generation,patch,O_k,h_k,O_boa,h_boa,diff_flag`, no header.
pub fn write_trajectory_rows<W: Write>(run: &CoupledRun, out: &mut W) -> io::Result<()> {
    for (occ, boa) in run.occupancy.iter().zip(&run.boa) {
        write_pair_rows(occ, boa, out)?;
    }
    Ok(())
}

fn write_pair_rows<W: Write>(occ: &SpomState, boa: &SpomState, out: &mut W) -> io::Result<()> {
    for patch in occ.domain().patches() {
        let (o_k, h_k) = occ.get(patch);
        let (o_b, h_b) = boa.get(patch);
        let diff = o_k != o_b || h_k != h_b;
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            occ.generation(),
            patch,
            o_k as u8,
            h_k,
            o_b as u8,
            h_b,
            diff as u8
        )?;
    }
    Ok(())
}
