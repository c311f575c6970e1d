//! Batch experiments over parameter grids, serialized as CSV.
//!
//! A config is a flat list of `key = value` lines; list values are comma
//! separated and `#` starts a comment. Every experiment accepts `seed`,
//! `trials` and `out`; the remaining keys are listed per kind in
//! [`ExperimentKind::keys`].
//!
//! Trial `t` of grid cell `c` is seeded with `trial_seed(seed, c, t)`, and
//! cells are written in grid order, so the output does not depend on the
//! number of threads.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use rayon::prelude::*;

use crate::analysis;
use crate::configuration::{self, sample_lambda_d};
use crate::error::{Error, Result};
use crate::hamilton::{count_restricted_h, find_loose_hamilton, has_restricted_cycle};
use crate::hypergraph::{generate_gamma, generate_hnpk};
use crate::matching::{find_perfect_matching, MatchingFailure, DEFAULT_BUDGET};
use crate::rng::{sub_seed, trial_seed};

/// Largest `n` accepted by the threshold sweep when `k = 3`.
pub const SWEEP_MAX_N_K3: usize = 20;
/// Largest `n` accepted by the threshold sweep for `k > 3`.
pub const SWEEP_MAX_N: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExperimentKind {
    ThresholdSweep,
    SpoiledStats,
    LambdaHamilton,
    MatchingSuccess,
    AnalysisReport,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 5] = [
        ExperimentKind::ThresholdSweep,
        ExperimentKind::SpoiledStats,
        ExperimentKind::LambdaHamilton,
        ExperimentKind::MatchingSuccess,
        ExperimentKind::AnalysisReport,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::ThresholdSweep => "threshold-sweep",
            ExperimentKind::SpoiledStats => "spoiled-stats",
            ExperimentKind::LambdaHamilton => "lambda-hamilton",
            ExperimentKind::MatchingSuccess => "matching-success",
            ExperimentKind::AnalysisReport => "analysis-report",
        }
    }

    /// Keys accepted in addition to `seed`, `trials`, `out` and `kind`.
    pub fn keys(self) -> &'static [&'static str] {
        match self {
            ExperimentKind::ThresholdSweep => &["n", "k", "c"],
            ExperimentKind::SpoiledStats => &["m", "d", "kappa"],
            ExperimentKind::LambdaHamilton => &["m", "d", "kappa"],
            ExperimentKind::MatchingSuccess => &["m", "k", "c", "p", "budget"],
            ExperimentKind::AnalysisReport => &["d", "kappa", "m", "resolution", "grid_csv"],
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment kind `{s}`")))
    }
}

/// A parsed experiment config.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    kind: ExperimentKind,
    entries: BTreeMap<String, String>,
}

const COMMON_KEYS: [&str; 4] = ["kind", "seed", "trials", "out"];

impl ExperimentConfig {
    /// An empty config of the given kind.
    pub fn new(kind: ExperimentKind) -> Self {
        Self { kind, entries: BTreeMap::new() }
    }

    /// Parses config text. A `kind` entry, if present, must match `kind`.
    pub fn parse(kind: ExperimentKind, text: &str) -> Result<Self> {
        let mut cfg = Self::new(kind);
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if cfg.entries.contains_key(key) {
                return Err(Error::Config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            cfg.set(key, value)?;
        }
        if let Some(k) = cfg.entries.get("kind") {
            if k.parse::<ExperimentKind>()? != kind {
                return Err(Error::Config(format!("config is for `{k}`, not `{kind}`")));
            }
        }
        Ok(cfg)
    }

    pub fn from_file(kind: ExperimentKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(kind, &text)
    }

    pub fn kind(&self) -> ExperimentKind {
        self.kind
    }

    /// Sets or replaces an entry.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        if !COMMON_KEYS.contains(&key) && !self.kind.keys().contains(&key) {
            return Err(Error::Config(format!("unknown key `{key}` for {}", self.kind)));
        }
        self.entries.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn get_raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        let Some(raw) = self.entries.get(key) else {
            return Ok(None);
        };
        raw.split(',')
            .map(|s| {
                let s = s.trim();
                s.parse::<T>().map_err(|_| Error::Config(format!("`{key}`: cannot parse `{s}`")))
            })
            .collect::<Result<Vec<T>>>()
            .and_then(|v| {
                if v.is_empty() {
                    Err(Error::Config(format!("`{key}` is empty")))
                } else {
                    Ok(Some(v))
                }
            })
    }

    fn required_list<T: FromStr>(&self, key: &str) -> Result<Vec<T>> {
        self.list(key)?.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    fn single<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.list::<T>(key)? {
            None => Ok(None),
            Some(mut v) if v.len() == 1 => Ok(v.pop()),
            Some(_) => Err(Error::Config(format!("`{key}` takes a single value"))),
        }
    }

    fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.single(key)?.ok_or_else(|| Error::Config(format!("missing key `{key}`")))
    }

    pub fn seed(&self) -> Result<u64> {
        Ok(self.single("seed")?.unwrap_or(0))
    }

    pub fn trials(&self) -> Result<usize> {
        let t: usize = self.required("trials")?;
        if t == 0 {
            return Err(Error::Config("`trials` must be positive".into()));
        }
        Ok(t)
    }

    pub fn out(&self) -> Option<PathBuf> {
        self.get_raw("out").map(PathBuf::from)
    }
}

/// CSV text plus an optional key-value report.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ExperimentOutput {
    pub csv: String,
    pub report: String,
    /// Optional grid dump requested by `grid_csv`, with its destination.
    pub grid: Option<(PathBuf, String)>,
}

struct Table {
    writer: csv::Writer<Vec<u8>>,
}

impl Table {
    fn new(header: &[&str]) -> Result<Self> {
        let mut writer = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        writer.write_record(header)?;
        Ok(Self { writer })
    }

    fn row(&mut self, fields: &[String]) -> Result<()> {
        self.writer.write_record(fields)?;
        Ok(())
    }

    fn finish(self) -> Result<String> {
        let bytes = self.writer.into_inner().map_err(|e| Error::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }
}

fn frequency(hits: usize, trials: usize) -> f64 {
    hits as f64 / trials as f64
}

/// `p = min(1, c (k−1)! ln n / n^{k−1})`.
pub fn sweep_probability(n: usize, k: usize, c: f64) -> f64 {
    let fact: f64 = (1..k).map(|i| i as f64).product();
    (c * fact * (n as f64).ln() / (n as f64).powi(k as i32 - 1)).min(1.0)
}

/// `p = min(1, c ln n′ / n′^{k−1})` with `n′ = 2m + κm`.
pub fn matching_probability(m: usize, k: usize, c: f64) -> f64 {
    let n = (2 * m + (k - 2) * m) as f64;
    (c * n.ln() / n.powi(k as i32 - 1)).min(1.0)
}

/// One cell of a threshold sweep.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub hc_freq: f64,
    pub iso_freq: f64,
    pub seed: u64,
}

/// Estimates `Pr(loose Hamilton cycle)` and `Pr(isolated vertex)` in
/// `H(n, p; k)` over a grid of `n` and `c`.
pub fn run_threshold_sweep(cfg: &ExperimentConfig) -> Result<Vec<SweepRow>> {
    let ns: Vec<usize> = cfg.required_list("n")?;
    let k: usize = cfg.required("k")?;
    let cs: Vec<f64> = cfg.required_list("c")?;
    let trials = cfg.trials()?;
    let seed = cfg.seed()?;
    if k < 3 {
        return Err(Error::invalid(format!("k = {k} must be at least 3")));
    }
    for &n in &ns {
        if n % (2 * (k - 1)) != 0 {
            return Err(Error::Divisibility { n, divisor: 2 * (k - 1) });
        }
        let max = if k == 3 { SWEEP_MAX_N_K3 } else { SWEEP_MAX_N };
        if n > max {
            return Err(Error::invalid(format!("n = {n} exceeds the exact-search limit {max} for k = {k}")));
        }
    }
    if let Some(c) = cs.iter().find(|c| !(c.is_finite() && **c >= 0.0)) {
        return Err(Error::invalid(format!("c = {c} must be finite and nonnegative")));
    }
    let cells: Vec<(usize, f64)> = ns.iter().flat_map(|&n| cs.iter().map(move |&c| (n, c))).collect();
    cells
        .iter()
        .enumerate()
        .map(|(ci, &(n, c))| {
            let p = sweep_probability(n, k, c);
            let outcomes: Vec<(bool, bool)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let h = generate_hnpk(n, k, p, trial_seed(seed, ci as u64, t as u64))?;
                    Ok((find_loose_hamilton(&h)?.is_some(), h.has_isolated_vertex()))
                })
                .collect::<Result<_>>()?;
            Ok(SweepRow {
                n,
                k,
                c,
                p,
                trials,
                hc_freq: frequency(outcomes.iter().filter(|o| o.0).count(), trials),
                iso_freq: frequency(outcomes.iter().filter(|o| o.1).count(), trials),
                seed,
            })
        })
        .collect()
}

fn sweep_csv(rows: &[SweepRow]) -> Result<String> {
    let mut t = Table::new(&["n", "k", "c", "p", "trials", "hc_freq", "iso_freq", "seed"])?;
    for r in rows {
        t.row(&[
            r.n.to_string(),
            r.k.to_string(),
            r.c.to_string(),
            r.p.to_string(),
            r.trials.to_string(),
            r.hc_freq.to_string(),
            r.iso_freq.to_string(),
            r.seed.to_string(),
        ])?;
    }
    t.finish()
}

/// One cell of the spoiled-edge statistics.
#[derive(Clone, Debug, PartialEq)]
pub struct SpoiledRow {
    pub m: usize,
    pub d: usize,
    pub kappa: usize,
    pub trials: usize,
    pub mean_s1: f64,
    pub mean_s2: f64,
    pub chi2_pvalue: f64,
    pub unspoiled_freq: f64,
    pub limit_mean_s1: f64,
    pub limit_mean_s2: f64,
    pub seed: u64,
}

/// Spoiled-edge counts per `(m, d, κ)` cell. Cell `c` runs
/// [`configuration::spoiled_statistics_experiment`] with seed
/// `sub_seed(seed, c)`.
pub fn run_spoiled_stats(cfg: &ExperimentConfig) -> Result<Vec<SpoiledRow>> {
    let trials = cfg.trials()?;
    let seed = cfg.seed()?;
    grid_mdk(cfg)?
        .into_iter()
        .enumerate()
        .map(|(ci, (m, d, kappa))| {
            let s = configuration::spoiled_statistics_experiment(m, d, kappa, trials, sub_seed(seed, ci as u64))?;
            let (l1, l2) = (configuration::poisson_mean_s1(d), configuration::poisson_mean_s2(d, kappa));
            Ok(SpoiledRow {
                m,
                d,
                kappa,
                trials,
                mean_s1: s.mean_s1,
                mean_s2: s.mean_s2,
                chi2_pvalue: s.chi_square_vs_poisson(l1 + l2).p_value,
                unspoiled_freq: s.unspoiled_frequency(),
                limit_mean_s1: l1,
                limit_mean_s2: l2,
                seed,
            })
        })
        .collect()
}

fn grid_mdk(cfg: &ExperimentConfig) -> Result<Vec<(usize, usize, usize)>> {
    let ms: Vec<usize> = cfg.required_list("m")?;
    let ds: Vec<usize> = cfg.required_list("d")?;
    let ks: Vec<usize> = cfg.required_list("kappa")?;
    let mut cells = Vec::new();
    for &m in &ms {
        for &d in &ds {
            for &kappa in &ks {
                cells.push((m, d, kappa));
            }
        }
    }
    Ok(cells)
}

fn spoiled_csv(rows: &[SpoiledRow]) -> Result<String> {
    let mut t = Table::new(&[
        "m",
        "d",
        "kappa",
        "trials",
        "mean_s1",
        "mean_s2",
        "chi2_pvalue",
        "unspoiled_freq",
        "limit_mean_s1",
        "limit_mean_s2",
        "seed",
    ])?;
    for r in rows {
        t.row(&[
            r.m.to_string(),
            r.d.to_string(),
            r.kappa.to_string(),
            r.trials.to_string(),
            r.mean_s1.to_string(),
            r.mean_s2.to_string(),
            r.chi2_pvalue.to_string(),
            r.unspoiled_freq.to_string(),
            r.limit_mean_s1.to_string(),
            r.limit_mean_s2.to_string(),
            r.seed.to_string(),
        ])?;
    }
    t.finish()
}

/// One cell of the `Λ_d` Hamiltonicity experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRow {
    pub m: usize,
    pub d: usize,
    pub kappa: usize,
    pub trials: usize,
    /// Frequency of a loose Hamilton cycle in the projected hypergraph.
    pub hc_freq: f64,
    /// Frequency of a cycle whose edges meet only in X.
    pub restricted_freq: f64,
    pub mean_restricted_count: f64,
    pub mean_rejections: f64,
    pub bound: f64,
    pub seed: u64,
}

/// Largest vertex count `2m + 2κm` accepted by the `Λ_d` experiment.
pub const LAMBDA_MAX_VERTICES: usize = 48;

/// Samples `Λ_d` per `(m, d, κ)` cell and records how often it has a loose
/// Hamilton cycle.
pub fn run_lambda_hamilton(cfg: &ExperimentConfig) -> Result<Vec<LambdaRow>> {
    let trials = cfg.trials()?;
    let seed = cfg.seed()?;
    let cells = grid_mdk(cfg)?;
    for &(m, d, kappa) in &cells {
        configuration::PartitionScheme::new(m, d, kappa)?;
        let n = 2 * m + 2 * kappa * m;
        if n > LAMBDA_MAX_VERTICES {
            return Err(Error::invalid(format!("2m + 2κm = {n} exceeds the limit {LAMBDA_MAX_VERTICES}")));
        }
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(ci, (m, d, kappa))| {
            let outcomes: Vec<(bool, bool, u64, u64)> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let sample = sample_lambda_d(m, d, kappa, trial_seed(seed, ci as u64, t as u64))?;
                    let general = find_loose_hamilton(&sample.hypergraph())?.is_some();
                    let restricted = has_restricted_cycle(&sample.edges, m, d, kappa)?;
                    let count = if restricted { count_restricted_h(&sample.edges, m, d, kappa)? } else { 0 };
                    Ok((general, restricted, count, sample.rejections))
                })
                .collect::<Result<_>>()?;
            let bound = if d > 0 { 1.0 - 3.0 * kappa as f64 / d as f64 } else { f64::NAN };
            Ok(LambdaRow {
                m,
                d,
                kappa,
                trials,
                hc_freq: frequency(outcomes.iter().filter(|o| o.0).count(), trials),
                restricted_freq: frequency(outcomes.iter().filter(|o| o.1).count(), trials),
                mean_restricted_count: outcomes.iter().map(|o| o.2 as f64).sum::<f64>() / trials as f64,
                mean_rejections: outcomes.iter().map(|o| o.3 as f64).sum::<f64>() / trials as f64,
                bound,
                seed,
            })
        })
        .collect()
}

fn lambda_csv(rows: &[LambdaRow]) -> Result<String> {
    let mut t = Table::new(&[
        "m",
        "d",
        "kappa",
        "trials",
        "hc_freq",
        "restricted_freq",
        "mean_restricted_count",
        "mean_rejections",
        "bound",
        "seed",
    ])?;
    for r in rows {
        t.row(&[
            r.m.to_string(),
            r.d.to_string(),
            r.kappa.to_string(),
            r.trials.to_string(),
            r.hc_freq.to_string(),
            r.restricted_freq.to_string(),
            r.mean_restricted_count.to_string(),
            r.mean_rejections.to_string(),
            r.bound.to_string(),
            r.seed.to_string(),
        ])?;
    }
    t.finish()
}

/// One cell of the perfect-matching experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct MatchingRow {
    pub m: usize,
    pub k: usize,
    /// `NaN` when the cell was given by an explicit `p`.
    pub c: f64,
    pub p: f64,
    pub trials: usize,
    pub success_freq: f64,
    pub exhausted: usize,
    pub budget_exceeded: usize,
    pub seed: u64,
}

/// Perfect-matching frequency in `Γ(S, T, p)` with `|S| = 2m`, `|T| = κm`.
/// Cells come from `c` (with `p = min(1, c ln n′/n′^{k−1})`) or from
/// explicit `p` values, not both.
pub fn run_matching_success(cfg: &ExperimentConfig) -> Result<Vec<MatchingRow>> {
    let ms: Vec<usize> = cfg.required_list("m")?;
    let k: usize = cfg.required("k")?;
    let trials = cfg.trials()?;
    let seed = cfg.seed()?;
    let budget: u64 = cfg.single("budget")?.unwrap_or(DEFAULT_BUDGET);
    let cs: Option<Vec<f64>> = cfg.list("c")?;
    let ps: Option<Vec<f64>> = cfg.list("p")?;
    if k < 3 {
        return Err(Error::invalid(format!("k = {k} must be at least 3")));
    }
    let mut cells = Vec::new();
    for &m in &ms {
        match (&cs, &ps) {
            (Some(cs), None) => cells.extend(cs.iter().map(|&c| (m, c, matching_probability(m, k, c)))),
            (None, Some(ps)) => cells.extend(ps.iter().map(|&p| (m, f64::NAN, p))),
            _ => return Err(Error::Config("exactly one of `c` and `p` is required".into())),
        }
    }
    cells
        .into_iter()
        .enumerate()
        .map(|(ci, (m, c, p))| {
            let outcomes: Vec<std::result::Result<(), MatchingFailure>> = (0..trials)
                .into_par_iter()
                .map(|t| {
                    let g = generate_gamma(m, k, p, trial_seed(seed, ci as u64, t as u64))?;
                    Ok(find_perfect_matching(&g, budget).map(|_| ()))
                })
                .collect::<Result<_>>()?;
            let count = |f: fn(&std::result::Result<(), MatchingFailure>) -> bool| outcomes.iter().filter(|o| f(o)).count();
            Ok(MatchingRow {
                m,
                k,
                c,
                p,
                trials,
                success_freq: frequency(count(|o| o.is_ok()), trials),
                exhausted: count(|o| matches!(o, Err(MatchingFailure::Exhausted { .. }))),
                budget_exceeded: count(|o| matches!(o, Err(MatchingFailure::BudgetExceeded { .. }))),
                seed,
            })
        })
        .collect()
}

fn matching_csv(rows: &[MatchingRow]) -> Result<String> {
    let mut t = Table::new(&["m", "k", "c", "p", "trials", "success_freq", "exhausted", "budget_exceeded", "seed"])?;
    for r in rows {
        t.row(&[
            r.m.to_string(),
            r.k.to_string(),
            if r.c.is_nan() { String::new() } else { r.c.to_string() },
            r.p.to_string(),
            r.trials.to_string(),
            r.success_freq.to_string(),
            r.exhausted.to_string(),
            r.budget_exceeded.to_string(),
            r.seed.to_string(),
        ])?;
    }
    t.finish()
}

/// One `(d, κ)` cell of the analysis report, with an optional variance sum.
#[derive(Clone, Debug, PartialEq)]
pub struct AnalysisRow {
    pub critical: analysis::CriticalPointReport,
    pub psi: analysis::PsiRootReport,
    pub variance_bound: f64,
    pub hc_bound: f64,
    pub variance: Option<analysis::VarianceSum>,
}

fn analysis_rows(cfg: &ExperimentConfig) -> Result<Vec<AnalysisRow>> {
    let ds: Vec<u32> = cfg.required_list("d")?;
    let ks: Vec<u32> = cfg.required_list("kappa")?;
    let ms: Option<Vec<u64>> = cfg.list("m")?;
    let resolution: usize = cfg.single("resolution")?.unwrap_or(400);
    let mut cells = Vec::new();
    for &d in &ds {
        for &kappa in &ks {
            match &ms {
                Some(ms) => cells.extend(ms.iter().map(|&m| (d, kappa, Some(m)))),
                None => cells.push((d, kappa, None)),
            }
        }
    }
    cells
        .into_iter()
        .map(|(d, kappa, m)| {
            Ok(AnalysisRow {
                critical: analysis::verify_global_max(d, kappa, resolution)?,
                psi: analysis::verify_psi_root(d, kappa, 1000)?,
                variance_bound: analysis::variance_ratio_bound(d, kappa)?,
                hc_bound: analysis::hc_probability_bound(d, kappa)?,
                variance: m.map(|m| analysis::variance_sum_upper(m, d, kappa)).transpose()?,
            })
        })
        .collect()
}

fn analysis_csv(rows: &[AnalysisRow]) -> Result<String> {
    let mut t = Table::new(&[
        "d",
        "kappa",
        "x0",
        "y0",
        "g",
        "grad_norm",
        "det_numeric",
        "det_closed_form",
        "det_rel_error",
        "negative_definite",
        "h",
        "h_closed_form",
        "outside_max_g",
        "g1_max",
        "g2_max",
        "global_max_verified",
        "psi_rel_residual",
        "psi_decreasing",
        "variance_bound",
        "hc_bound",
        "m",
        "variance_sum",
        "dominant_x",
        "dominant_y",
        "boundary_share",
    ])?;
    for r in rows {
        let c = &r.critical;
        let s = c.search.as_ref();
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        let v = r.variance.as_ref();
        t.row(&[
            c.d.to_string(),
            c.kappa.to_string(),
            c.point.0.to_string(),
            c.point.1.to_string(),
            c.value.to_string(),
            c.gradient_norm.to_string(),
            c.determinant.to_string(),
            c.determinant_closed_form.to_string(),
            c.determinant_rel_error().to_string(),
            c.negative_definite.to_string(),
            c.h_value.to_string(),
            c.h_closed_form.to_string(),
            opt(s.map(|s| s.outside_value)),
            opt(s.map(|s| s.g1_max)),
            opt(s.map(|s| s.g2_max)),
            c.global_max_verified().to_string(),
            r.psi.relative_residual.to_string(),
            r.psi.strictly_decreasing().to_string(),
            r.variance_bound.to_string(),
            r.hc_bound.to_string(),
            v.map(|v| v.m.to_string()).unwrap_or_default(),
            opt(v.map(|v| v.total)),
            opt(v.map(|v| v.dominant_point().0)),
            opt(v.map(|v| v.dominant_point().1)),
            opt(v.map(|v| v.boundary_share)),
        ])?;
    }
    t.finish()
}

fn analysis_report_text(rows: &[AnalysisRow]) -> String {
    let mut out = String::new();
    for r in rows {
        let _ = writeln!(out, "[critical_point]\n{}", r.critical);
        let _ = writeln!(out, "[psi_root]\n{}", r.psi);
        if let Some(v) = &r.variance {
            let _ = writeln!(out, "[variance_sum]\n{v}");
        }
    }
    out
}

fn grid_csv(cfg: &ExperimentConfig) -> Result<String> {
    let ds: Vec<u32> = cfg.required_list("d")?;
    let ks: Vec<u32> = cfg.required_list("kappa")?;
    let resolution: usize = cfg.single("resolution")?.unwrap_or(400);
    let mut t = Table::new(&["d", "kappa", "x", "y", "g"])?;
    for &d in &ds {
        for &kappa in &ks {
            for (x, y, g) in analysis::g_grid(d, kappa, resolution)? {
                t.row(&[d.to_string(), kappa.to_string(), x.to_string(), y.to_string(), g.to_string()])?;
            }
        }
    }
    t.finish()
}

/// Runs the experiment described by `cfg`.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentOutput> {
    let mut out = ExperimentOutput::default();
    match cfg.kind() {
        ExperimentKind::ThresholdSweep => out.csv = sweep_csv(&run_threshold_sweep(cfg)?)?,
        ExperimentKind::SpoiledStats => out.csv = spoiled_csv(&run_spoiled_stats(cfg)?)?,
        ExperimentKind::LambdaHamilton => out.csv = lambda_csv(&run_lambda_hamilton(cfg)?)?,
        ExperimentKind::MatchingSuccess => out.csv = matching_csv(&run_matching_success(cfg)?)?,
        ExperimentKind::AnalysisReport => {
            let rows = analysis_rows(cfg)?;
            out.csv = analysis_csv(&rows)?;
            out.report = analysis_report_text(&rows);
            if let Some(path) = cfg.get_raw("grid_csv") {
                out.grid = Some((PathBuf::from(path), grid_csv(cfg)?));
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(kind: ExperimentKind, text: &str) -> ExperimentConfig {
        ExperimentConfig::parse(kind, text).unwrap()
    }

    #[test]
    fn parser_basics() {
        let c = cfg(ExperimentKind::ThresholdSweep, "# sweep\nn = 8, 12 # two sizes\nk=3\nc = 0.5,1\n\ntrials = 3\n");
        assert_eq!(c.required_list::<usize>("n").unwrap(), vec![8, 12]);
        assert_eq!(c.required::<usize>("k").unwrap(), 3);
        assert_eq!(c.seed().unwrap(), 0);
        assert!(c.required::<usize>("n").is_err());
    }

    #[test]
    fn parser_errors_are_config_errors() {
        let kind = ExperimentKind::SpoiledStats;
        for text in ["m 3", "m = 1\nm = 2", "n = 4", "kind = threshold-sweep", "m = x", "m = 1,"] {
            let e = ExperimentConfig::parse(kind, text)
                .and_then(|c| c.required_list::<usize>("m").map(|_| c))
                .unwrap_err();
            assert!(e.is_config_error(), "{text}: {e}");
        }
        let c = cfg(kind, "m = 1\nd = 2\nkappa = 1");
        assert!(run_spoiled_stats(&c).unwrap_err().is_config_error());
    }

    #[test]
    fn sweep_trivial_cells() {
        let c = cfg(ExperimentKind::ThresholdSweep, "n = 8\nk = 3\nc = 0, 1000\ntrials = 5\nseed = 1");
        let rows = run_threshold_sweep(&c).unwrap();
        assert_eq!((rows[0].hc_freq, rows[0].iso_freq), (0.0, 1.0));
        assert_eq!(rows[1].p, 1.0);
        assert_eq!(rows[1].hc_freq, 1.0);
    }

    #[test]
    fn sweep_preconditions() {
        let c = cfg(ExperimentKind::ThresholdSweep, "n = 10\nk = 3\nc = 1\ntrials = 1");
        assert!(matches!(run_threshold_sweep(&c), Err(Error::Divisibility { .. })));
        let c = cfg(ExperimentKind::ThresholdSweep, "n = 24\nk = 3\nc = 1\ntrials = 1");
        assert!(matches!(run_threshold_sweep(&c), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn matching_full_probability() {
        let c = cfg(ExperimentKind::MatchingSuccess, "m = 3\nk = 3\np = 1\ntrials = 4");
        let rows = run_matching_success(&c).unwrap();
        assert_eq!(rows[0].success_freq, 1.0);
        let both = cfg(ExperimentKind::MatchingSuccess, "m = 3\nk = 3\np = 1\nc = 1\ntrials = 4");
        assert!(run_matching_success(&both).unwrap_err().is_config_error());
    }

    #[test]
    fn csv_is_deterministic_and_lf() {
        let c = cfg(ExperimentKind::LambdaHamilton, "m = 2\nd = 4\nkappa = 1\ntrials = 20\nseed = 9");
        let a = run_experiment(&c).unwrap().csv;
        let b = run_experiment(&c).unwrap().csv;
        assert_eq!(a, b);
        assert!(!a.contains('\r'));
        assert!(a.starts_with("m,d,kappa,trials,hc_freq"));
    }

    #[test]
    fn spoiled_schema() {
        let c = cfg(ExperimentKind::SpoiledStats, "m = 5\nd = 4\nkappa = 2\ntrials = 50");
        let csv = run_experiment(&c).unwrap().csv;
        assert!(csv.starts_with("m,d,kappa,trials,mean_s1,mean_s2,chi2_pvalue"));
        assert_eq!(csv.lines().count(), 2);
    }

    #[test]
    fn analysis_report_determinant_columns() {
        let c = cfg(ExperimentKind::AnalysisReport, "d = 10\nkappa = 1\nresolution = 200\nm = 10");
        let out = run_experiment(&c).unwrap();
        let mut reader = csv::Reader::from_reader(out.csv.as_bytes());
        let headers = reader.headers().unwrap().clone();
        let rec = reader.records().next().unwrap().unwrap();
        let get = |name: &str| rec.get(headers.iter().position(|h| h == name).unwrap()).unwrap().to_string();
        assert!(get("det_rel_error").parse::<f64>().unwrap() < 1e-9);
        assert!(out.report.contains("det_closed_form = "));
        assert!(out.report.contains("[variance_sum]"));
    }
}
