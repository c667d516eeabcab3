//! `seedbank` command-line driver.
//!
//! Every subcommand resolves a JSON configuration (file, then `--set key=value`
//! overrides, then the dedicated flags), writes its CSV outputs and a `manifest.json`
//! holding the resolved configuration into `--out`. Feeding the manifest back through
//! `--config` reproduces the CSVs byte for byte, for any `--jobs`.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use config::{Command, RunConfig};
use error::Failure;

#[derive(Debug, Parser)]
#[command(name = "seedbank", version, about = "Seed-bank metapopulation simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// JSON configuration file (a manifest from an earlier run works too).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override one configuration key; the value is parsed as JSON when possible.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE", value_parser = config::parse_override)]
    overrides: Vec<(String, String)>,

    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Maximal dormancy H.
    #[arg(long = "H", global = true)]
    max_dormancy: Option<u64>,

    /// Patch extinction probability p.
    #[arg(long = "p", global = true)]
    extinction: Option<f64>,

    #[arg(long, global = true)]
    half_width: Option<usize>,

    #[arg(long, global = true)]
    horizon: Option<usize>,

    #[arg(long, global = true)]
    generations: Option<u64>,

    #[arg(long, global = true)]
    replicates: Option<usize>,

    /// Output directory.
    #[arg(long, global = true, default_value = ".")]
    out: PathBuf,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    jobs: Option<usize>,
}

impl Cli {
    fn overrides(&self) -> Vec<(String, String)> {
        let mut all = self.overrides.clone();
        let mut flag = |key: &str, v: Option<String>| {
            if let Some(v) = v {
                all.push((key.to_string(), v));
            }
        };
        flag("seed", self.seed.map(|v| v.to_string()));
        flag("H", self.max_dormancy.map(|v| v.to_string()));
        flag("p", self.extinction.map(|v| v.to_string()));
        flag("half_width", self.half_width.map(|v| v.to_string()));
        flag("horizon", self.horizon.map(|v| v.to_string()));
        flag("generations", self.generations.map(|v| v.to_string()));
        flag("replicates", self.replicates.map(|v| v.to_string()));
        all
    }
}

fn execute(cli: &Cli) -> Result<(), Failure> {
    let config: RunConfig = config::load(cli.config.as_deref(), &cli.overrides())?.resolve(cli.command)?;
    let jobs = match cli.jobs {
        Some(0) => return Err(Failure::Invalid("jobs = 0 is out of range: expected >= 1".into())),
        Some(j) => j,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Failure::Runtime(format!("cannot start worker pool: {e}")))?;
    let out = commands::Output::new(&cli.out, &config)?;
    pool.install(|| commands::run(cli.command, &config, &out))?;
    let manifest = out.write("manifest.json", config.manifest().as_bytes())?;
    eprintln!("{}: wrote {}", cli.command.name(), manifest.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("seedbank: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
