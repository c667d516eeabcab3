//! Run configuration: a flat JSON document whose keys mirror the model symbols, plus
//! the run and scan settings of each subcommand. The manifest written next to every
//! output is the same document after resolution, so it can be fed back via `--config`.

use std::collections::hash_map::RandomState;
use std::hash::{BuildHasher, Hasher};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

use seedbank::experiments::SeededBlock;
use seedbank::params::{validate_params, Params, RawParams, Topology};
use seedbank::percolation::PercConfig;

use crate::error::Failure;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::Subcommand)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Seed-bank runs from a seeded block; viable/expired seed densities per generation.
    Simulate,
    /// BOA occupancy trajectory from a seeded block.
    Boa,
    /// Seed bank, occupancy and BOA under shared extinction; trajectory and deviations.
    Coupled,
    /// Critical extinction probability scan for one H.
    Pcrit,
    /// Critical extinction probability scans over a list of H.
    Curve,
    /// Fraction of coupled runs without occupancy/BOA deviation, per M.
    Convergence,
    /// Isolated-plant offspring counts against the three-binomial law.
    Offspring,
    /// Full seed-bank state of every generation.
    DumpState,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Simulate => "simulate",
            Command::Boa => "boa",
            Command::Coupled => "coupled",
            Command::Pcrit => "pcrit",
            Command::Curve => "curve",
            Command::Convergence => "convergence",
            Command::Offspring => "offspring",
            Command::DumpState => "dump-state",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitBlock {
    #[serde(default)]
    pub first: i64,
    #[serde(default = "default_block_count")]
    pub count: usize,
    #[serde(default)]
    pub age: u32,
}

fn default_block_count() -> usize {
    5
}

impl From<InitBlock> for SeededBlock {
    fn from(b: InitBlock) -> Self {
        SeededBlock {
            first: b.first,
            count: b.count,
            age: b.age,
        }
    }
}

impl Default for InitBlock {
    fn default() -> Self {
        let d = SeededBlock::default();
        Self {
            first: d.first,
            count: d.count,
            age: d.age,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(rename = "M", default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(rename = "H", default, skip_serializing_if = "Option::is_none")]
    pub h: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub g: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<Topology>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicates: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generations: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub init: Option<InitBlock>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "M_sequence", default, skip_serializing_if = "Option::is_none")]
    pub m_sequence: Option<Vec<usize>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub half_width: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accept_threshold: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_start: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_step: Option<f64>,
    #[serde(rename = "H_list", default, skip_serializing_if = "Option::is_none")]
    pub h_list: Option<Vec<u32>>,

    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub command: Option<Command>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resolved_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub git_describe: Option<String>,
}

/// Reads the document at `path` (or starts empty) and applies `key=value` overrides
/// in order. Values are parsed as JSON, falling back to a plain string.
pub fn load(path: Option<&Path>, overrides: &[(String, String)]) -> Result<RunConfig, Failure> {
    let mut doc = match path {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Failure::Invalid(format!("cannot read config file {}: {e}", path.display())))?;
            match serde_json::from_str::<Value>(&text) {
                Ok(Value::Object(map)) => map,
                Ok(_) => {
                    return Err(Failure::Invalid(format!(
                        "config file {} must hold a JSON object",
                        path.display()
                    )))
                }
                Err(e) => return Err(Failure::Invalid(format!("config file {}: {e}", path.display()))),
            }
        }
        None => Map::new(),
    };
    for (key, value) in overrides {
        let v = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.clone()));
        doc.insert(key.clone(), v);
    }
    serde_json::from_value(Value::Object(doc)).map_err(|e| Failure::Invalid(format!("config: {e}")))
}

pub fn parse_override(s: &str) -> Result<(String, String), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("override `{s}` is not of the form key=value"))?;
    if k.is_empty() {
        return Err(format!("override `{s}` has an empty key"));
    }
    Ok((k.to_string(), v.to_string()))
}

fn fresh_seed() -> u64 {
    RandomState::new().build_hasher().finish()
}

fn missing(key: &str, expected: &str) -> Failure {
    Failure::Invalid(format!("{key} = missing is out of range: expected {expected}"))
}

impl RunConfig {
    /// Fills in the seed and every default the command reads, so that the result
    /// fully determines the outputs.
    pub fn resolve(mut self, command: Command) -> Result<Self, Failure> {
        let seed = self.seed.or(self.resolved_seed).unwrap_or_else(fresh_seed);
        self.seed = Some(seed);
        self.resolved_seed = Some(seed);
        self.command = Some(command);
        self.git_describe = Some(env!("SEEDBANK_GIT_DESCRIBE").to_string());

        match command {
            Command::Simulate => {
                self.replicates.get_or_insert(1);
                self.generations.get_or_insert(100);
                self.init.get_or_insert_with(InitBlock::default);
            }
            Command::Boa | Command::Coupled | Command::DumpState => {
                self.generations.get_or_insert(10);
                self.init.get_or_insert_with(InitBlock::default);
            }
            Command::Convergence => {
                self.replicates.get_or_insert(500);
                self.generations.get_or_insert(10);
                self.init.get_or_insert_with(InitBlock::default);
                let sizes = self.m_sequence.get_or_insert_with(|| vec![10, 20, 40, 80]).clone();
                if sizes.is_empty() {
                    return Err(Failure::Invalid(
                        "M_sequence = [] is out of range: expected at least one M".into(),
                    ));
                }
                if self.m.is_none() {
                    self.m = Some(sizes[0] as u64);
                }
                if self.alpha.is_none() {
                    return Err(missing("alpha", "alpha > 1 (k is derived as ceil(M^alpha))"));
                }
            }
            Command::Offspring => {
                self.replicates.get_or_insert(100_000);
                match self.p {
                    None => self.p = Some(0.0),
                    Some(p) if p != 0.0 => {
                        return Err(Failure::Invalid(format!(
                            "p = {p} is out of range: the offspring test requires p = 0"
                        )))
                    }
                    Some(_) => {}
                }
            }
            Command::Pcrit | Command::Curve => {
                let d = PercConfig::desk(0, seed);
                self.half_width.get_or_insert(d.half_width);
                self.horizon.get_or_insert(d.horizon);
                self.accept_threshold.get_or_insert(d.accept_threshold);
                self.p_start.get_or_insert(d.p_start);
                self.p_step.get_or_insert(d.p_step);
                self.replicates.get_or_insert(d.replicates);
                if command == Command::Pcrit && self.h.is_none() {
                    return Err(missing("H", "a non-negative integer"));
                }
                if command == Command::Curve {
                    let hs = self.h_list.get_or_insert_with(|| vec![0, 1, 2, 3]);
                    if hs.is_empty() {
                        return Err(Failure::Invalid(
                            "H_list = [] is out of range: expected at least one H".into(),
                        ));
                    }
                }
            }
        }
        if let Some(0) = self.replicates {
            return Err(Failure::Invalid("replicates = 0 is out of range: expected >= 1".into()));
        }
        if let Some(init) = self.init {
            if init.count == 0 {
                return Err(Failure::Invalid("init.count = 0 is out of range: expected >= 1".into()));
            }
        }
        Ok(self)
    }

    pub fn seed(&self) -> u64 {
        self.seed.expect("resolved config has a seed")
    }

    pub fn raw_params(&self) -> RawParams {
        RawParams {
            seeds_per_patch: self.m,
            max_dormancy: self.h,
            germination: self.g,
            colonization: self.c,
            extinction: self.p,
            parents: self.k,
            alpha: self.alpha,
            topology: self.topology,
        }
    }

    pub fn params(&self) -> Result<Params, Failure> {
        Ok(validate_params(&self.raw_params())?)
    }

    /// Scan settings for dormancy `h`.
    pub fn perc_config(&self, h: u32) -> Result<PercConfig, Failure> {
        let config = PercConfig {
            max_dormancy: h,
            extinction: 0.0,
            half_width: self.half_width.expect("resolved"),
            horizon: self.horizon.expect("resolved"),
            accept_threshold: self.accept_threshold.expect("resolved"),
            p_start: self.p_start.expect("resolved"),
            p_step: self.p_step.expect("resolved"),
            seed: self.seed(),
            replicates: self.replicates.expect("resolved"),
        };
        config.validate()?;
        Ok(config)
    }

    pub fn max_dormancy(&self) -> Result<u32, Failure> {
        let h = self.h.ok_or_else(|| missing("H", "a non-negative integer"))?;
        u32::try_from(h)
            .ok()
            .filter(|&h| h < u32::MAX / 2)
            .ok_or_else(|| Failure::Invalid(format!("H = {h} is out of range: expected H < 2^31")))
    }

    /// SHA-256 of the canonical resolved document, without the build identifier.
    pub fn fingerprint(&self) -> String {
        let canonical = RunConfig {
            git_describe: None,
            ..self.clone()
        };
        let bytes = serde_json::to_vec(&canonical).expect("config serializes");
        Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn manifest(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config serializes");
        s.push('\n');
        s
    }
}
