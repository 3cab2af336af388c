//! Monte Carlo estimation of decoding rates, soundness over a fixed corpus
//! and a small battery of distinguishing tests.

use std::io::Write;
use std::path::Path;
use std::time::Instant;

use prc_core::channels::ChannelSpec;
use prc_core::gf2::BitMatrix;
use prc_core::sampling::{sample_positions, sample_uniform};
use prc_core::stats::{wilson_interval, Proportion, Z99};
use prc_core::weakxor::{
    rank_attack, sample_planted_xor, AttackVerdict, RankAttackMode, WeakXorParams, XorMatrix,
};
use prc_core::{BitString, RngStream, StreamRng};
use serde::Serialize;
use serde_json::json;

use crate::config::{config_hash, ParamsFile, SchemeName, SchemeSpec};
use crate::dynamic::KeyedScheme;
use crate::error::{Result, ToolError};
use crate::runner::{Runner, CHUNK};

/// How many keys and trials to run, and from which stream.
#[derive(Debug, Clone, Copy)]
pub struct Plan {
    pub keys: u64,
    pub trials: u64,
    pub stream: RngStream,
    /// Record wall time per cell. Off by default so reports are byte-stable.
    pub timing: bool,
}

impl Plan {
    pub fn new(keys: u64, trials: u64, stream: RngStream) -> Result<Self> {
        if trials == 0 || keys == 0 {
            return Err(ToolError::Config(
                "trials and keys must be at least 1".into(),
            ));
        }
        if keys > trials {
            return Err(ToolError::Config(format!(
                "{keys} keys for only {trials} trials"
            )));
        }
        Ok(Plan {
            keys,
            trials,
            stream,
            timing: false,
        })
    }

    /// Trial indices assigned to key `k`.
    pub fn key_range(&self, k: u64) -> std::ops::Range<u64> {
        k * self.trials / self.keys..(k + 1) * self.trials / self.keys
    }

    pub fn key_stream(&self, k: u64) -> RngStream {
        self.stream.named("key").child(k)
    }

    pub fn trial_stream(&self, i: u64) -> RngStream {
        self.stream.named("trial").child(i)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialReport {
    pub successes: u64,
    pub trials: u64,
    pub estimate: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub seconds: Option<f64>,
    /// Success counts per key, in key order.
    pub per_key: Vec<(u64, u64)>,
}

impl TrialReport {
    pub fn from_keys(per_key: Vec<Proportion>, seconds: Option<f64>) -> Self {
        let total = per_key
            .iter()
            .fold(Proportion::new(0, 0), |acc, p| acc.merge(*p));
        let (ci_lo, ci_hi) = total.ci99();
        TrialReport {
            successes: total.successes,
            trials: total.trials,
            estimate: total.estimate(),
            ci_lo,
            ci_hi,
            seconds,
            per_key: per_key.iter().map(|p| (p.successes, p.trials)).collect(),
        }
    }

    pub fn proportion(&self) -> Proportion {
        Proportion::new(self.successes, self.trials)
    }

    pub fn min_key_rate(&self) -> f64 {
        self.per_key
            .iter()
            .map(|&(s, t)| Proportion::new(s, t).estimate())
            .fold(f64::INFINITY, f64::min)
    }
}

fn elapsed(start: Instant, timing: bool) -> Option<f64> {
    timing.then(|| start.elapsed().as_secs_f64())
}

/// Pr[decode(channel(encode)) = ONE], with a fresh key per block of trials.
pub fn estimate_decode_rate(
    spec: &SchemeSpec,
    channel: &ChannelSpec,
    plan: &Plan,
    runner: &Runner,
) -> Result<TrialReport> {
    let start = Instant::now();
    let mut per_key = Vec::with_capacity(plan.keys as usize);
    for k in 0..plan.keys {
        let keyed = spec.keygen(plan.key_stream(k))?;
        let range = plan.key_range(k);
        let ones = runner.count(range.end - range.start, |j| {
            let mut rng = plan.trial_stream(range.start + j).rng();
            let y = channel.apply(&keyed.encode(&mut rng), &mut rng)?;
            Ok::<_, ToolError>(keyed.decode(&y)?.is_one())
        })?;
        per_key.push(Proportion::new(ones, range.end - range.start));
    }
    Ok(TrialReport::from_keys(per_key, elapsed(start, plan.timing)))
}

/// Fixed strings (and uniform strings) that decoding should reject.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CorpusMember {
    Zeros,
    Ones,
    /// `1010...`.
    Alternating,
    /// Zeros then ones.
    Halves,
    Random,
}

impl CorpusMember {
    pub const ALL: [CorpusMember; 5] = [
        CorpusMember::Zeros,
        CorpusMember::Ones,
        CorpusMember::Alternating,
        CorpusMember::Halves,
        CorpusMember::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorpusMember::Zeros => "zeros",
            CorpusMember::Ones => "ones",
            CorpusMember::Alternating => "alternating",
            CorpusMember::Halves => "halves",
            CorpusMember::Random => "random",
        }
    }

    pub fn string(self, len: usize, rng: &mut StreamRng) -> BitString {
        match self {
            CorpusMember::Zeros => BitString::zeros(len),
            CorpusMember::Ones => BitString::ones(len),
            CorpusMember::Alternating => {
                BitString::from_bools(&(0..len).map(|i| i % 2 == 0).collect::<Vec<_>>())
            }
            CorpusMember::Halves => {
                BitString::from_bools(&(0..len).map(|i| i >= len / 2).collect::<Vec<_>>())
            }
            CorpusMember::Random => sample_uniform(len, rng),
        }
    }
}

/// BOT rate of every corpus member. Key `k` is shared across members; the
/// random member draws a fresh string per trial.
pub fn estimate_soundness(
    spec: &SchemeSpec,
    plan: &Plan,
    runner: &Runner,
) -> Result<Vec<(CorpusMember, TrialReport)>> {
    let start = Instant::now();
    let mut per_member: Vec<Vec<Proportion>> = vec![Vec::new(); CorpusMember::ALL.len()];
    for k in 0..plan.keys {
        let keyed = spec.keygen(plan.key_stream(k))?;
        let len = keyed.codeword_len();
        let range = plan.key_range(k);
        let trials = range.end - range.start;
        for (m, member) in CorpusMember::ALL.iter().enumerate() {
            let bots = if *member == CorpusMember::Random {
                runner.count(trials, |j| {
                    let mut rng = plan.trial_stream(range.start + j).rng();
                    let x = member.string(len, &mut rng);
                    Ok::<_, ToolError>(!keyed.decode(&x)?.is_one())
                })?
            } else {
                // A fixed string against a fixed key gives the same verdict
                // on every trial.
                let x = member.string(len, &mut plan.key_stream(k).rng());
                if keyed.decode(&x)?.is_one() {
                    0
                } else {
                    trials
                }
            };
            per_member[m].push(Proportion::new(bots, trials));
        }
    }
    let seconds = elapsed(start, plan.timing);
    Ok(CorpusMember::ALL
        .iter()
        .zip(per_member)
        .map(|(m, p)| (*m, TrialReport::from_keys(p, seconds)))
        .collect())
}

/// Newcombe's hybrid score interval for `a - b` at 99%.
pub fn newcombe_interval(a: Proportion, b: Proportion) -> (f64, f64) {
    let (l1, u1) = wilson_interval(a.successes, a.trials, Z99);
    let (l2, u2) = wilson_interval(b.successes, b.trials, Z99);
    let (p1, p2) = (a.estimate(), b.estimate());
    let d = p1 - p2;
    let lo = d - ((p1 - l1).powi(2) + (u2 - p2).powi(2)).sqrt();
    let hi = d + ((u1 - p1).powi(2) + (p2 - l2).powi(2)).sqrt();
    (lo, hi)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Advantage {
    pub test: &'static str,
    /// Pr[test = 1] on the source.
    pub source: f64,
    /// Pr[test = 1] on the uniform reference.
    pub reference: f64,
    pub samples: u64,
    /// `source - reference`.
    pub difference: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Advantage {
    fn new(test: &'static str, a: Proportion, b: Proportion) -> Self {
        let (ci_lo, ci_hi) = newcombe_interval(a, b);
        Advantage {
            test,
            source: a.estimate(),
            reference: b.estimate(),
            samples: a.trials,
            difference: a.estimate() - b.estimate(),
            ci_lo,
            ci_hi,
        }
    }

    pub fn advantage(&self) -> f64 {
        self.difference.abs()
    }

    pub fn ci_contains_zero(&self) -> bool {
        self.ci_lo <= 0.0 && 0.0 <= self.ci_hi
    }
}

/// What the distinguishers are pointed at.
pub enum Source<'a> {
    /// Codewords under one fixed key. With `matrices`, the rank test
    /// compares fresh planted matrices against uniform ones.
    Codewords {
        keyed: &'a dyn KeyedScheme,
        matrices: Option<WeakXorParams>,
    },
    /// Uniform strings, the null case.
    Uniform {
        len: usize,
        matrix_dims: Option<(usize, usize)>,
    },
}

impl Source<'_> {
    fn len(&self) -> usize {
        match self {
            Source::Codewords { keyed, .. } => keyed.codeword_len(),
            Source::Uniform { len, .. } => *len,
        }
    }

    fn sample(&self, rng: &mut StreamRng) -> BitString {
        match self {
            Source::Codewords { keyed, .. } => keyed.encode(rng),
            Source::Uniform { len, .. } => sample_uniform(*len, rng),
        }
    }

    fn matrix_dims(&self) -> Option<(usize, usize)> {
        match self {
            Source::Codewords { matrices, .. } => matrices.map(|p| (p.n, p.m)),
            Source::Uniform { matrix_dims, .. } => *matrix_dims,
        }
    }

    fn matrix(&self, rng: &mut StreamRng) -> Result<XorMatrix> {
        match self {
            Source::Codewords {
                matrices: Some(p), ..
            } => Ok(sample_planted_xor(p, rng)?.0),
            _ => {
                let (n, m) = self.matrix_dims().expect("rank test needs dimensions");
                uniform_matrix(n, m, rng)
            }
        }
    }
}

pub fn uniform_matrix(n: usize, m: usize, rng: &mut StreamRng) -> Result<XorMatrix> {
    let rows = (0..n).map(|_| sample_uniform(m, rng)).collect();
    Ok(XorMatrix::new(BitMatrix::from_rows(rows, m)?))
}

/// Rank test on an `n x m` matrix: whole-matrix rank when `n <= m`,
/// otherwise sixteen random half-width row subsets.
pub fn rank_mode(n: usize, m: usize) -> RankAttackMode {
    if n <= m {
        RankAttackMode::WholeMatrix
    } else {
        RankAttackMode::Submatrices { samples: 16 }
    }
}

pub const STRING_TESTS: [&str; 4] = [
    "bit-frequency",
    "pairwise-correlation",
    "random-subset-xor",
    "fixed-parity",
];

struct StringTests {
    subset: Vec<usize>,
    fixed: Vec<usize>,
}

impl StringTests {
    fn eval(&self, x: &BitString) -> [bool; 4] {
        let n = x.len();
        let shifted = x.slice(1, n - 1);
        let agree = (n - 1) - shifted.distance(&x.slice(0, n - 1));
        [
            2 * x.weight() > n,
            2 * agree > n - 1,
            x.parity_at(&self.subset),
            x.parity_at(&self.fixed),
        ]
    }
}

/// Runs the battery with `q` source samples and `q` uniform samples.
/// `fixed_parity` overrides the subset of the fixed-parity test, e.g. with
/// a secret support to check that the battery sees known structure.
pub fn distinguisher_suite(
    source: &Source<'_>,
    q: u64,
    fixed_parity: Option<Vec<usize>>,
    stream: RngStream,
    runner: &Runner,
) -> Result<Vec<Advantage>> {
    if q < 100 {
        return Err(ToolError::Config(format!(
            "distinguishers need q >= 100, got {q}"
        )));
    }
    let len = source.len();
    if len < 2 {
        return Err(ToolError::Config(
            "distinguishers need strings of length >= 2".into(),
        ));
    }
    let mut setup = stream.named("tests").rng();
    let tests = StringTests {
        subset: sample_positions(len, len / 2, &mut setup)?,
        fixed: match fixed_parity {
            Some(s) => s,
            None => sample_positions(len, len.min(3), &mut setup)?,
        },
    };
    if tests.fixed.iter().any(|&i| i >= len) {
        return Err(ToolError::Config("fixed-parity subset out of range".into()));
    }
    let tally = |label: &str, draw: &(dyn Fn(&mut StreamRng) -> BitString + Sync)| -> [u64; 4] {
        let named = stream.named(label);
        runner
            .map_chunks(q, CHUNK, |range| {
                let mut counts = [0u64; 4];
                for j in range {
                    let bits = tests.eval(&draw(&mut named.child(j).rng()));
                    for (c, b) in counts.iter_mut().zip(bits) {
                        *c += u64::from(b);
                    }
                }
                counts
            })
            .into_iter()
            .fold([0; 4], |mut acc, c| {
                for (a, v) in acc.iter_mut().zip(c) {
                    *a += v;
                }
                acc
            })
    };
    let src = tally("source", &|rng| source.sample(rng));
    let reference = tally("reference", &|rng| sample_uniform(len, rng));
    let mut out: Vec<Advantage> = STRING_TESTS
        .iter()
        .enumerate()
        .map(|(i, name)| {
            Advantage::new(
                name,
                Proportion::new(src[i], q),
                Proportion::new(reference[i], q),
            )
        })
        .collect();
    if let Some((n, m)) = source.matrix_dims() {
        let mode = rank_mode(n, m);
        let planted = |label: &str, from_source: bool| {
            let named = stream.named(label);
            runner.count(q, |j| {
                let mut rng = named.child(j).rng();
                let g = if from_source {
                    source.matrix(&mut rng)?
                } else {
                    uniform_matrix(n, m, &mut rng)?
                };
                Ok::<_, ToolError>(rank_attack(&g, mode, &mut rng)? == AttackVerdict::Planted)
            })
        };
        let a = planted("rank-source", true)?;
        let b = planted("rank-reference", false)?;
        out.push(Advantage::new(
            "rank-attack",
            Proportion::new(a, q),
            Proportion::new(b, q),
        ));
    }
    Ok(out)
}

/// One labelled row of a report.
#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    pub labels: Vec<(String, String)>,
    pub estimate: f64,
    /// 99% interval; empty in the CSV for statistics without one.
    pub ci: Option<(f64, f64)>,
    pub trials: u64,
    pub seconds: Option<f64>,
}

impl Cell {
    pub fn from_report(labels: Vec<(String, String)>, r: &TrialReport) -> Self {
        Cell {
            labels,
            estimate: r.estimate,
            ci: Some((r.ci_lo, r.ci_hi)),
            trials: r.trials,
            seconds: r.seconds,
        }
    }

    pub fn from_proportion(labels: Vec<(String, String)>, p: Proportion) -> Self {
        Cell::from_report(labels, &TrialReport::from_keys(vec![p], None))
    }

    /// A statistic without an interval, e.g. a distance.
    pub fn value(labels: Vec<(String, String)>, estimate: f64, trials: u64) -> Self {
        Cell {
            labels,
            estimate,
            ci: None,
            trials,
            seconds: None,
        }
    }
}

/// Builds a label list from `(name, value)` pairs.
pub fn labels<const N: usize>(pairs: [(&str, String); N]) -> Vec<(String, String)> {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

pub const REPORT_COLUMNS: [&str; 5] = ["estimate", "ci_lo", "ci_hi", "trials", "seconds"];

/// CSV with the cell labels followed by [`REPORT_COLUMNS`]. All cells must
/// carry the same label names.
pub fn write_report<W: Write>(cells: &[Cell], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let names: Vec<&str> = cells
        .first()
        .map(|c| c.labels.iter().map(|(k, _)| k.as_str()).collect())
        .unwrap_or_default();
    w.write_record(names.iter().copied().chain(REPORT_COLUMNS))?;
    for cell in cells {
        let got: Vec<&str> = cell.labels.iter().map(|(k, _)| k.as_str()).collect();
        if got != names {
            return Err(ToolError::Config(
                "report cells have different label columns".into(),
            ));
        }
        let mut row: Vec<String> = cell.labels.iter().map(|(_, v)| v.clone()).collect();
        row.push(format!("{:.6}", cell.estimate));
        let (lo, hi) = match cell.ci {
            Some((lo, hi)) => (format!("{lo:.6}"), format!("{hi:.6}")),
            None => (String::new(), String::new()),
        };
        row.push(lo);
        row.push(hi);
        row.push(cell.trials.to_string());
        row.push(cell.seconds.map(|s| format!("{s:.3}")).unwrap_or_default());
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| ToolError::io("<csv>", e))?;
    Ok(())
}

pub fn report_string(cells: &[Cell]) -> Result<String> {
    let mut buf = Vec::new();
    write_report(cells, &mut buf)?;
    Ok(String::from_utf8(buf).expect("csv output is utf-8"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Decode,
    Soundness,
}

/// Everything `prc experiment` needs.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub scheme: SchemeName,
    pub params: ParamsFile,
    pub trials: u64,
    pub seed: u64,
    pub mode: Mode,
    pub timing: bool,
}

/// Runs every sweep cell and returns the report cells plus JSON metadata.
pub fn run_cells(
    cfg: &ExperimentConfig,
    runner: &Runner,
) -> Result<(Vec<Cell>, serde_json::Value)> {
    let start = Instant::now();
    let root = RngStream::new(cfg.seed, 0);
    let mut cells = Vec::new();
    let mut per_key = Vec::new();
    for (c, (labels, params)) in cfg.params.cells(cfg.scheme)?.into_iter().enumerate() {
        let mut plan = Plan::new(params.keys, cfg.trials, root.child(c as u64))?;
        plan.timing = cfg.timing;
        match cfg.mode {
            Mode::Decode => {
                let report = estimate_decode_rate(&params.scheme, &params.channel, &plan, runner)?;
                per_key.push(json!({ "cell": labels, "per_key": report.per_key }));
                cells.push(Cell::from_report(labels, &report));
            }
            Mode::Soundness => {
                for (member, report) in estimate_soundness(&params.scheme, &plan, runner)? {
                    let mut labels = labels.clone();
                    labels.push(("input".into(), member.name().into()));
                    per_key.push(json!({ "cell": labels, "per_key": report.per_key }));
                    cells.push(Cell::from_report(labels, &report));
                }
            }
        }
    }
    let meta = json!({
        "scheme": cfg.scheme.as_str(),
        "mode": match cfg.mode { Mode::Decode => "decode", Mode::Soundness => "soundness" },
        "seed": cfg.seed,
        "trials": cfg.trials,
        "config_hash": config_hash(&json!({
            "scheme": cfg.scheme.as_str(),
            "params": cfg.params.doc,
            "trials": cfg.trials,
            "seed": cfg.seed,
        })),
        "wall_seconds": start.elapsed().as_secs_f64(),
        "workers": runner.workers(),
        "cells": per_key,
    });
    Ok((cells, meta))
}

/// Writes `out` (CSV) and `out` with `.json` appended (metadata).
pub fn run_experiment(cfg: &ExperimentConfig, runner: &Runner, out: &Path) -> Result<Vec<Cell>> {
    let (cells, meta) = run_cells(cfg, runner)?;
    let file = std::fs::File::create(out).map_err(|e| ToolError::io(out, e))?;
    write_report(&cells, file)?;
    let meta_path = {
        let mut p = out.as_os_str().to_owned();
        p.push(".json");
        std::path::PathBuf::from(p)
    };
    let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
    std::fs::write(&meta_path, text + "\n").map_err(|e| ToolError::io(&meta_path, e))?;
    Ok(cells)
}
