use std::collections::VecDeque;
use std::io::{self, Write};

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{range_err, Error, Result};
use crate::rng::{derive_stream, open_threshold, replicate_seed, RngKey, Role};

/// Grid, horizon and scan settings for the half-line percolation estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PercConfig {
    pub max_dormancy: u32,
    pub extinction: f64,
    /// Sites are `-half_width..=half_width`.
    pub half_width: usize,
    pub horizon: usize,
    pub accept_threshold: f64,
    pub p_start: f64,
    pub p_step: f64,
    pub seed: u64,
    /// Realizations per probe; the scan uses their median edge. 1 by default.
    pub replicates: usize,
}

impl PercConfig {
    /// 2000 x 2000 grid: fast enough for tests and the default CLI run.
    pub fn desk(max_dormancy: u32, seed: u64) -> Self {
        Self {
            max_dormancy,
            extinction: 0.0,
            half_width: 2000,
            horizon: 2000,
            accept_threshold: -0.005,
            p_start: 0.99,
            p_step: 0.01,
            seed,
            replicates: 1,
        }
    }

    /// The full 21001-site, 10000-generation grid.
    pub fn full_scale(max_dormancy: u32, seed: u64) -> Self {
        Self {
            half_width: 10_500,
            horizon: 10_000,
            ..Self::desk(max_dormancy, seed)
        }
    }

    pub fn with_extinction(&self, p: f64) -> Self {
        Self {
            extinction: p,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.extinction) {
            return Err(range_err("p", self.extinction, "[0, 1]"));
        }
        if self.half_width == 0 {
            return Err(range_err("half_width", 0, "a positive integer"));
        }
        if self.horizon == 0 {
            return Err(range_err("horizon", 0, "a positive integer"));
        }
        if !(self.p_start > 0.0 && self.p_start <= 1.0) {
            return Err(range_err("p_start", self.p_start, "(0, 1]"));
        }
        if !(self.p_step > 0.0 && self.p_step < self.p_start) {
            return Err(range_err(
                "p_step",
                self.p_step,
                format!("(0, p_start = {})", self.p_start),
            ));
        }
        if !self.accept_threshold.is_finite() {
            return Err(range_err("accept_threshold", self.accept_threshold, "a finite real"));
        }
        if self.replicates == 0 {
            return Err(range_err("replicates", 0, "a positive integer"));
        }
        Ok(())
    }

    fn sites(&self) -> usize {
        2 * self.half_width + 1
    }
}

fn words_for(bits: usize) -> usize {
    bits.div_ceil(64)
}

#[inline]
fn get_bit(row: &[u64], i: usize) -> bool {
    row.get(i / 64).is_some_and(|w| w >> (i % 64) & 1 == 1)
}

#[inline]
fn set_bit(row: &mut [u64], i: usize, on: bool) {
    if on {
        row[i / 64] |= 1 << (i % 64);
    } else {
        row[i / 64] &= !(1 << (i % 64));
    }
}

fn highest_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .rev()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + 63 - w.leading_zeros() as usize)
}

/// Open sites of row `t` among the first `sites` sites (bit `x + X` for site x).
///
/// Site uniforms come from one sequential stream per row, so a shorter prefix sees the
/// same uniforms and rows at different p share them: open iff U ≥ p.
pub fn open_row_prefix(seed: u64, extinction: f64, t: usize, sites: usize) -> Vec<u64> {
    let threshold = open_threshold(extinction);
    let mut rng = derive_stream(RngKey::new(seed, t as u64, 0, Role::PercRow, 0));
    let mut row = vec![0u64; words_for(sites)];
    for (wi, word) in row.iter_mut().enumerate() {
        let n = (sites - wi * 64).min(64);
        let mut w = 0u64;
        for b in 0..n {
            if rng.next_u64() >> 11 >= threshold {
                w |= 1 << b;
            }
        }
        *word = w;
    }
    row
}

/// Open sites of row `t` over the whole grid.
pub fn open_row(config: &PercConfig, t: usize) -> Vec<u64> {
    open_row_prefix(config.seed, config.extinction, t, config.sites())
}

/// The last H + 1 rows of reachable sites, advanced one time step at a time.
///
/// Site −X is passable whenever a neighbour reaches it, site +X never is, and the base
/// half-line x ≤ 0 counts as reached at every t ≤ H.
#[derive(Debug, Clone)]
pub struct PercFrontier {
    half_width: usize,
    max_dormancy: usize,
    rows: VecDeque<Vec<u64>>,
    highest: VecDeque<Option<usize>>,
    next_time: usize,
}

impl PercFrontier {
    pub fn new(half_width: usize, max_dormancy: u32) -> Self {
        Self {
            half_width,
            max_dormancy: max_dormancy as usize,
            rows: VecDeque::new(),
            highest: VecDeque::new(),
            next_time: 0,
        }
    }

    fn sites(&self) -> usize {
        2 * self.half_width + 1
    }

    /// Time of the next row to be computed.
    pub fn next_time(&self) -> usize {
        self.next_time
    }

    /// Highest site index any next-row bit can reach (one past the highest stored bit).
    pub fn reach_limit(&self) -> usize {
        let top = self.highest.iter().flatten().max().map_or(0, |&b| b + 1);
        let base = if self.next_time <= self.max_dormancy {
            self.half_width
        } else {
            0
        };
        top.max(base).min(self.sites() - 1)
    }

    /// Adds the row for `next_time` given the open sites (missing tail words read as closed).
    pub fn step(&mut self, open: &[u64]) {
        let sites = self.sites();
        let nw = words_for(sites);
        let limit_words = words_for(self.reach_limit() + 1);
        let mut union = vec![0u64; limit_words];
        for row in &self.rows {
            for (u, w) in union.iter_mut().zip(row) {
                *u |= w;
            }
        }
        let mut next = vec![0u64; nw];
        for i in 0..limit_words {
            let u = union[i];
            let from_left = (u << 1) | if i > 0 { union[i - 1] >> 63 } else { 0 };
            let from_right = (u >> 1) | union.get(i + 1).map_or(0, |w| w << 63);
            let dilated = u | from_left | from_right;
            next[i] = dilated & open.get(i).copied().unwrap_or(0);
            if i == 0 {
                // left border: passable whenever reached
                next[0] |= dilated & 1;
            }
        }
        set_bit(&mut next, sites - 1, false);
        let tail = sites % 64;
        if tail != 0 {
            next[nw - 1] &= (1u64 << tail) - 1;
        }
        if self.next_time <= self.max_dormancy {
            for i in 0..=self.half_width {
                set_bit(&mut next, i, true);
            }
        }
        let high = highest_bit(&next);
        self.rows.push_back(next);
        self.highest.push_back(high);
        if self.rows.len() > self.max_dormancy + 1 {
            self.rows.pop_front();
            self.highest.pop_front();
        }
        self.next_time += 1;
    }

    /// Generates the needed prefix of the next open row and steps.
    pub fn advance(&mut self, seed: u64, extinction: f64) {
        let open = open_row_prefix(seed, extinction, self.next_time, self.reach_limit() + 1);
        self.step(&open);
    }

    /// Row computed `back` steps ago (0 = latest).
    pub fn row(&self, back: usize) -> Option<&[u64]> {
        let n = self.rows.len();
        (back < n).then(|| self.rows[n - 1 - back].as_slice())
    }

    pub fn is_reached(&self, back: usize, x: i64) -> bool {
        let i = x + self.half_width as i64;
        i >= 0 && self.row(back).is_some_and(|r| get_bit(r, i as usize))
    }

    /// Rightmost reached site of the latest row other than the left border column.
    pub fn rightmost_interior(&self) -> Option<i64> {
        let high = (*self.highest.back()?)?;
        (high > 0).then(|| high as i64 - self.half_width as i64)
    }
}

/// Rightmost site, other than the left border column, reached at some time in
/// `T..=T+H`; `None` if there is none.
pub fn rbar(config: &PercConfig) -> Option<i64> {
    let mut frontier = PercFrontier::new(config.half_width, config.max_dormancy);
    let end = config.horizon + config.max_dormancy as usize;
    let mut best = None;
    for t in 0..=end {
        frontier.advance(config.seed, config.extinction);
        if t >= config.horizon {
            best = best.max(frontier.rightmost_interior());
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanProbe {
    pub extinction: f64,
    /// Median edge over the probe's realizations (one by default).
    pub rbar: Option<i64>,
    pub ratio: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub max_dormancy: u32,
    pub estimate: f64,
    pub trace: Vec<ScanProbe>,
}

fn probe(config: &PercConfig, p: f64) -> ScanProbe {
    let empty = -(config.half_width as i64 + 1);
    let mut edges: Vec<i64> = (0..config.replicates as u64)
        .map(|r| {
            let seed = if r == 0 {
                config.seed
            } else {
                replicate_seed(config.seed, r)
            };
            let cfg = PercConfig {
                extinction: p,
                seed,
                ..config.clone()
            };
            rbar(&cfg).unwrap_or(empty)
        })
        .collect();
    edges.sort_unstable();
    let median = edges[edges.len() / 2];
    let ratio = median as f64 / config.horizon as f64;
    ScanProbe {
        extinction: p,
        rbar: (median != empty).then_some(median),
        ratio,
        accepted: ratio > config.accept_threshold,
    }
}

/// Probes p = p_start, p_start − p_step, ... and returns the first p whose edge
/// ratio rbar/T exceeds the acceptance threshold, with the full trace.
pub fn pcrit_scan(config: &PercConfig) -> Result<ScanResult> {
    config.validate()?;
    let mut trace = Vec::new();
    for i in 0.. {
        let raw = config.p_start - i as f64 * config.p_step;
        if raw < -1e-9 {
            break;
        }
        let p = ((raw * 1e9).round() / 1e9).max(0.0);
        let pr = probe(config, p);
        let accepted = pr.accepted;
        trace.push(pr);
        if accepted {
            return Ok(ScanResult {
                max_dormancy: config.max_dormancy,
                estimate: p,
                trace,
            });
        }
    }
    Err(Error::ScanExhausted)
}

pub const SCAN_CSV_HEADER: &str = "H,p,rbar,ratio,accepted";
pub const THRESHOLD_CSV_HEADER: &str = "H,p_crit_estimate,X,T,seed";

/// Rows `H,p,rbar,ratio,accepted`; an empty edge is written as −(X+1).
pub fn write_scan_rows<W: Write>(result: &ScanResult, config: &PercConfig, out: &mut W) -> io::Result<()> {
    let empty = -(config.half_width as i64 + 1);
    for pr in &result.trace {
        writeln!(
            out,
            "{},{},{},{},{}",
            result.max_dormancy,
            pr.extinction,
            pr.rbar.unwrap_or(empty),
            pr.ratio,
            pr.accepted as u8
        )?;
    }
    Ok(())
}
