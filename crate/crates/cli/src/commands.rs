use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use seedbank::experiments::{
    run_convergence, run_invasion, run_max_competition, run_offspring_test, run_threshold_curve, ConvergenceSpec,
    InvasionSpec, SeededBlock, CONVERGENCE_CSV_HEADER,
};
use seedbank::occupancy::{
    boa_step, coupled_run, deviation_scan, make_theorem1_initial, write_trajectory_rows, InitialOccupancy, SpomState,
    TRAJECTORY_CSV_HEADER,
};
use seedbank::params::Params;
use seedbank::percolation::{
    pcrit_scan, write_scan_rows, PercConfig, ScanResult, SCAN_CSV_HEADER, THRESHOLD_CSV_HEADER,
};
use seedbank::sample_extinction_field;
use seedbank::wfsb::{wfsb_step, write_state_rows, SeedBankState, STATE_CSV_HEADER};

use crate::config::{Command, RunConfig};
use crate::error::Failure;

/// Output directory plus the fingerprint line written at the top of every CSV.
pub struct Output {
    dir: PathBuf,
    fingerprint: String,
}

impl Output {
    pub fn new(dir: &Path, config: &RunConfig) -> Result<Self, Failure> {
        fs::create_dir_all(dir)
            .map_err(|e| Failure::Runtime(format!("cannot create output directory {}: {e}", dir.display())))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            fingerprint: config.fingerprint(),
        })
    }

    /// Writes `name`: the fingerprint comment, then `header` (unless the body writes
    /// its own), then the body.
    fn csv(
        &self,
        name: &str,
        header: Option<&str>,
        body: impl FnOnce(&mut Vec<u8>) -> io::Result<()>,
    ) -> Result<PathBuf, Failure> {
        let mut buf = Vec::new();
        writeln!(buf, "# fingerprint={}", self.fingerprint)?;
        if let Some(h) = header {
            writeln!(buf, "{h}")?;
        }
        body(&mut buf)?;
        self.write(name, &buf)
    }

    pub fn write(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, Failure> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", path.display())))?;
        Ok(path)
    }
}

pub fn run(command: Command, config: &RunConfig, out: &Output) -> Result<(), Failure> {
    match command {
        Command::Simulate => simulate(config, out),
        Command::Boa => boa(config, out),
        Command::Coupled => coupled(config, out),
        Command::Pcrit => pcrit(config, out),
        Command::Curve => curve(config, out),
        Command::Convergence => convergence(config, out),
        Command::Offspring => offspring(config, out),
        Command::DumpState => dump_state(config, out),
    }
}

fn block(config: &RunConfig) -> SeededBlock {
    config.init.expect("resolved").into()
}

fn initial_state(params: &Params, config: &RunConfig) -> Result<SeedBankState, Failure> {
    let b = block(config);
    let init = InitialOccupancy::block(params.topology, b.first, b.count, b.age, params.germination);
    Ok(make_theorem1_initial(params, &init, config.seed())?)
}

fn simulate(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = InvasionSpec {
        params: config.params()?,
        replicates: config.replicates.expect("resolved"),
        generations: config.generations.expect("resolved"),
        seed: config.seed(),
        init: block(config),
    };
    let series = run_invasion(&spec)?;
    out.csv("density.csv", None, |w| series.write_csv(w))?;
    println!(
        "simulate: {} of {} replicates hold viable seeds after {} generations",
        series.survivors(),
        spec.replicates,
        spec.generations
    );
    Ok(())
}

fn boa(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let params = config.params()?;
    let seed = config.seed();
    let b = block(config);
    let init = InitialOccupancy::block(params.topology, b.first, b.count, b.age, params.germination);
    let occupied = init.patches.iter().map(|s| s.occupied).collect();
    let ages = init
        .patches
        .iter()
        .map(|s| if s.occupied { s.age.min(params.age_cap()) } else { 0 })
        .collect();
    let state = SpomState::new(0, init.domain, params.age_cap(), occupied, ages);
    let mut states = vec![state];
    for n in 1..=config.generations.expect("resolved") {
        let last = states.last().expect("non-empty");
        let ext = sample_extinction_field(&params, n, last.domain().expanded(), seed);
        states.push(boa_step(last, &ext)?);
    }
    out.csv("boa.csv", Some("generation,patch,O,h"), |w| {
        for s in &states {
            for x in s.domain().patches() {
                let (o, h) = s.get(x);
                writeln!(w, "{},{x},{},{h}", s.generation(), o as u8)?;
            }
        }
        Ok(())
    })?;
    let last = states.last().expect("non-empty");
    println!(
        "boa: {} reachable patches at generation {}",
        last.reachable_patches().len(),
        last.generation()
    );
    Ok(())
}

fn coupled(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let params = config.params()?;
    let init = initial_state(&params, config)?;
    let run = coupled_run(&params, &init, config.generations.expect("resolved"), config.seed())?;
    let report = deviation_scan(&run, &params, config.epsilon);
    out.csv("trajectory.csv", Some(TRAJECTORY_CSV_HEADER), |w| {
        write_trajectory_rows(&run, w)
    })?;
    out.csv("deviations.csv", None, |w| report.write_csv(w))?;
    let counts: Vec<String> = seedbank::occupancy::DeviationEvent::ALL
        .iter()
        .map(|&e| format!("{}={}", e.label(), report.count(e)))
        .collect();
    println!("coupled: deviation counts {}", counts.join(" "));
    Ok(())
}

fn write_thresholds(out: &Output, scans: &[(ScanResult, PercConfig)]) -> Result<(), Failure> {
    out.csv("scan.csv", Some(SCAN_CSV_HEADER), |w| {
        for (scan, cfg) in scans {
            write_scan_rows(scan, cfg, w)?;
        }
        Ok(())
    })?;
    out.csv("threshold.csv", Some(THRESHOLD_CSV_HEADER), |w| {
        for (scan, cfg) in scans {
            writeln!(
                w,
                "{},{},{},{},{}",
                scan.max_dormancy, scan.estimate, cfg.half_width, cfg.horizon, cfg.seed
            )?;
        }
        Ok(())
    })?;
    Ok(())
}

fn pcrit(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let cfg = config.perc_config(config.max_dormancy()?)?;
    let scan = pcrit_scan(&cfg)?;
    println!("pcrit: H={} estimate {}", scan.max_dormancy, scan.estimate);
    write_thresholds(out, &[(scan, cfg)])
}

fn curve(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let base = config.perc_config(0)?;
    let curve = run_threshold_curve(&base, config.h_list.as_deref().expect("resolved"))?;
    for scan in &curve.scans {
        println!("curve: H={} estimate {}", scan.max_dormancy, scan.estimate);
    }
    println!("curve: non-decreasing in H: {}", curve.monotone);
    let scans: Vec<(ScanResult, PercConfig)> = curve
        .scans
        .into_iter()
        .map(|s| {
            let cfg = PercConfig {
                max_dormancy: s.max_dormancy,
                ..base.clone()
            };
            (s, cfg)
        })
        .collect();
    write_thresholds(out, &scans)
}

fn convergence(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let spec = ConvergenceSpec {
        params: config.params()?,
        sizes: config.m_sequence.clone().expect("resolved"),
        replicates: config.replicates.expect("resolved"),
        generations: config.generations.expect("resolved"),
        seed: config.seed(),
        init: block(config),
    };
    let rows = run_convergence(&spec)?;
    out.csv("convergence.csv", Some(CONVERGENCE_CSV_HEADER), |w| {
        for r in &rows {
            writeln!(w, "{}", r.csv_line())?;
        }
        Ok(())
    })?;
    for r in &rows {
        println!(
            "convergence: M={} k={} no-deviation fraction {} [{}, {}]",
            r.seeds_per_patch, r.parents, r.fraction, r.ci_low, r.ci_high
        );
    }
    Ok(())
}

fn offspring(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let params = config.params()?;
    let reps = config.replicates.expect("resolved");
    let report = run_offspring_test(&params, reps, config.seed());
    let competition = run_max_competition(&params, reps, config.seed());
    out.csv("offspring.csv", Some("count,observed,expected_probability"), |w| {
        for (n, (c, q)) in report.counts.iter().zip(&report.law.pmf).enumerate() {
            writeln!(w, "{n},{c},{q}")?;
        }
        Ok(())
    })?;
    out.csv(
        "offspring_summary.csv",
        Some("replicates,total_variation,chi_square,dof,p_value,mean,law_mean,competition_mean,competition_se"),
        |w| {
            writeln!(
                w,
                "{reps},{},{},{},{},{},{},{},{}",
                report.total_variation,
                report.chi_square.statistic,
                report.chi_square.dof,
                report.chi_square.p_value,
                report.mean,
                report.law.mean(),
                competition.mean,
                competition.std_error
            )
        },
    )?;
    println!(
        "offspring: TV {} chi-square p {} mean {} (law {}), max-competition mean {} +- {}",
        report.total_variation,
        report.chi_square.p_value,
        report.mean,
        report.law.mean(),
        competition.mean,
        competition.std_error
    );
    Ok(())
}

fn dump_state(config: &RunConfig, out: &Output) -> Result<(), Failure> {
    let params = config.params()?;
    let seed = config.seed();
    let mut state = initial_state(&params, config)?;
    let mut states = vec![state.clone()];
    for n in 1..=config.generations.expect("resolved") {
        let ext = sample_extinction_field(&params, n, state.domain().expanded(), seed);
        state = wfsb_step(&state, &params, &ext, seed)?;
        states.push(state.clone());
    }
    out.csv("state.csv", Some(STATE_CSV_HEADER), |w| {
        for s in &states {
            write_state_rows(s, w)?;
        }
        Ok(())
    })?;
    println!("dump-state: {} generations written", states.len());
    Ok(())
}
