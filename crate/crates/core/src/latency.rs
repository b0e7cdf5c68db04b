//! Decoding latency as the node count of the pruned decoding tree, plus
//! the scaling-exponent side calculations used to predict it.
//!
//! One node is one time step. Counting never needs the tree itself: a
//! post-order pass over the frozen mask carries a shape summary per
//! subtree ([`latency_counts_by`]), which is how sweeps reach `n = 27`.

use std::ops::RangeInclusive;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{BmsChannel, ChannelFamily};
use crate::codec::{kind_tree, NodeKind, Shape, Variant};
use crate::construction::{
    self, cache_file_name, for_each_bec_level, for_each_ga_level, ga_z, ConstructionError,
    ConstructionMethod, PolarCode, ReliabilityTable, GA_THRESHOLD_EXPONENT, MAX_TABLE_EXPONENT,
};

/// Default largest exponent for BSC/BAWGNC sweeps (density evolution cost).
pub const DEFAULT_DE_CAP: usize = 20;

#[derive(Debug, Error)]
pub enum LatencyError {
    #[error("slope window [{lo}, {hi}] holds {points} points for {variant}; at least 4 are needed")]
    WindowTooSmall { lo: usize, hi: usize, points: usize, variant: Variant },
    #[error("invalid scaling candidate: {0}")]
    InvalidCandidate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error(transparent)]
    Construction(#[from] ConstructionError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub level: usize,
    /// Index of the node among the nodes of its level, from the left.
    pub offset: usize,
    pub kind: NodeKind,
    /// Which child of its parent this node is; `None` for the root.
    pub side: Option<Side>,
}

/// Decoding tree pruned at the terminal kinds of a variant, in left-first
/// depth-first order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrunedTree {
    pub n: usize,
    pub variant: Variant,
    pub nodes: Vec<TreeNode>,
}

impl PrunedTree {
    pub fn latency(&self) -> u64 {
        self.nodes.len() as u64
    }
}

pub fn build_pruned_tree(code: &PolarCode, variant: Variant) -> PrunedTree {
    let kinds = kind_tree(code.frozen());
    let mut nodes = Vec::new();
    let n = code.n();
    // (level, offset, side)
    let mut stack = vec![(n, 0usize, None)];
    while let Some((level, offset, side)) = stack.pop() {
        let heap = (1usize << (n - level)) + offset;
        let kind = kinds[heap];
        nodes.push(TreeNode { level, offset, kind, side });
        if level > 0 && !variant.is_terminal(kind) {
            stack.push((level - 1, 2 * offset + 1, Some(Side::Right)));
            stack.push((level - 1, 2 * offset, Some(Side::Left)));
        }
    }
    PrunedTree { n, variant, nodes }
}

pub fn latency(tree: &PrunedTree) -> u64 {
    tree.latency()
}

/// Step tokens of a tree: `channel` for the root, then `f_l s` / `f_r s`
/// for each descent to a left / right child at level `s`.
pub fn schedule(tree: &PrunedTree) -> Vec<String> {
    tree.nodes
        .iter()
        .map(|node| match node.side {
            None => "channel".to_string(),
            Some(Side::Left) => format!("f_l {}", node.level),
            Some(Side::Right) => format!("f_r {}", node.level),
        })
        .collect()
}

/// Node counts of the three decoders for one code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatencyCounts {
    pub sc: u64,
    pub ssc: u64,
    pub fastssc: u64,
}

impl LatencyCounts {
    pub fn get(&self, variant: Variant) -> u64 {
        match variant {
            Variant::Sc => self.sc,
            Variant::Ssc => self.ssc,
            Variant::FastSsc => self.fastssc,
        }
    }
}

#[derive(Clone, Copy)]
struct Summary {
    shape: Shape,
    counts: [u64; 3],
}

impl Summary {
    fn leaf(frozen: bool) -> Self {
        Summary { shape: Shape::leaf(frozen), counts: [1; 3] }
    }

    fn join(left: Summary, right: Summary) -> Self {
        let shape = Shape::join(left.shape, right.shape);
        let kind = shape.kind();
        let mut counts = [1; 3];
        for (v, variant) in Variant::ALL.iter().enumerate() {
            if !variant.is_terminal(kind) {
                counts[v] += left.counts[v] + right.counts[v];
            }
        }
        Summary { shape, counts }
    }
}

const SEQUENTIAL_LEVEL: usize = 14;

fn summarize<F: Fn(usize) -> bool + Sync>(lo: usize, level: usize, frozen: &F) -> Summary {
    if level > SEQUENTIAL_LEVEL {
        let half = 1usize << (level - 1);
        let (l, r) = rayon::join(|| summarize(lo, level - 1, frozen), || summarize(lo + half, level - 1, frozen));
        return Summary::join(l, r);
    }
    // binary-counter merge of consecutive leaves: O(level) stack
    let mut stack: Vec<(usize, Summary)> = Vec::with_capacity(level + 1);
    for i in lo..lo + (1usize << level) {
        let mut cur = (0usize, Summary::leaf(frozen(i)));
        while let Some(&(l, s)) = stack.last() {
            if l != cur.0 {
                break;
            }
            stack.pop();
            cur = (l + 1, Summary::join(s, cur.1));
        }
        stack.push(cur);
    }
    stack[0].1
}

/// Latency of all three decoders for the code of length `len` whose
/// position `i` is frozen iff `frozen(i)`, without building any tree.
pub fn latency_counts_by<F: Fn(usize) -> bool + Sync>(len: usize, frozen: F) -> LatencyCounts {
    assert!(len.is_power_of_two(), "code length must be a power of two");
    let s = summarize(0, len.trailing_zeros() as usize, &frozen);
    LatencyCounts { sc: s.counts[0], ssc: s.counts[1], fastssc: s.counts[2] }
}

pub fn latency_counts(code: &PolarCode) -> LatencyCounts {
    latency_counts_by(code.len(), |i| code.is_frozen(i))
}

/// Counts for the threshold code of a slice of reliability values.
pub fn latency_counts_for_values(values: &[f64], p_e: f64) -> (LatencyCounts, usize) {
    let threshold = p_e / values.len() as f64;
    let counts = latency_counts_by(values.len(), |i| !(values[i] < threshold));
    let info = values.par_iter().filter(|&&z| z < threshold).count();
    (counts, info)
}

/// Latency of the threshold code of `table`, computed from the frozen mask
/// on the fly with `O(n)` memory beyond the table.
pub fn count_latency_streaming(table: &ReliabilityTable, p_e: f64, variant: Variant) -> u64 {
    latency_counts_for_values(table.values(), p_e).0.get(variant)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyRow {
    pub n: usize,
    pub rate: f64,
    pub latency_sc: Option<u64>,
    pub latency_ssc: Option<u64>,
    pub latency_fastssc: Option<u64>,
    pub method: ConstructionMethod,
}

impl LatencyRow {
    pub fn latency(&self, variant: Variant) -> Option<u64> {
        match variant {
            Variant::Sc => self.latency_sc,
            Variant::Ssc => self.latency_ssc,
            Variant::FastSsc => self.latency_fastssc,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlopeFit {
    pub variant: Variant,
    pub slope: f64,
    pub intercept: f64,
    pub window: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub requested_max: usize,
    pub computed_max: Option<usize>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LatencyReport {
    pub family: ChannelFamily,
    pub param: f64,
    pub p_e: f64,
    pub resolution: u32,
    pub rows: Vec<LatencyRow>,
    pub fitted_slopes: Vec<SlopeFit>,
    pub truncated: Option<Truncation>,
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub channel: BmsChannel,
    pub p_e: f64,
    pub n_range: RangeInclusive<usize>,
    pub variants: Vec<Variant>,
    pub resolution: usize,
    /// Largest exponent computed for BSC/BAWGNC.
    pub de_cap: usize,
    /// Directory for cached density-evolution tables.
    pub cache_dir: Option<PathBuf>,
}

impl SweepConfig {
    pub fn new(channel: BmsChannel, p_e: f64, n_range: RangeInclusive<usize>) -> Self {
        SweepConfig {
            channel,
            p_e,
            n_range,
            variants: Variant::ALL.to_vec(),
            resolution: crate::channel::DEFAULT_RESOLUTION,
            de_cap: DEFAULT_DE_CAP,
            cache_dir: None,
        }
    }

    /// Largest exponent this configuration may compute.
    pub fn limit(&self) -> usize {
        match self.channel.family() {
            ChannelFamily::Bec => MAX_TABLE_EXPONENT,
            _ => self.de_cap.min(MAX_TABLE_EXPONENT),
        }
    }

    /// Default slope window: `[20, 27]` for the BEC, `[16, cap]` otherwise,
    /// clipped to the computed range.
    pub fn default_window(&self) -> (usize, usize) {
        match self.channel.family() {
            ChannelFamily::Bec => (20, 27),
            _ => (16, self.de_cap),
        }
    }
}

/// Latency of the threshold codes for every `n` in the range, one row per
/// `n` in increasing order. Rows beyond the resource limit are dropped and
/// the report carries a truncation marker.
pub fn latency_sweep(config: &SweepConfig) -> Result<LatencyReport, LatencyError> {
    if !(config.p_e > 0.0 && config.p_e < 1.0) {
        return Err(LatencyError::InvalidArgument(format!("p_e = {} must lie in (0, 1)", config.p_e)));
    }
    if config.variants.is_empty() {
        return Err(LatencyError::InvalidArgument("no decoder variant selected".into()));
    }
    let (lo, requested_max) = (*config.n_range.start(), *config.n_range.end());
    if lo > requested_max {
        return Err(LatencyError::InvalidArgument(format!("empty n range {lo}..{requested_max}")));
    }
    let limit = config.limit();
    let hi = requested_max.min(limit);
    let truncated = (requested_max > limit).then(|| Truncation {
        requested_max,
        computed_max: (lo <= hi).then_some(hi),
        reason: format!(
            "{} sweeps are limited to n <= {limit} by the resource budget",
            config.channel.family()
        ),
    });

    let mut rows = Vec::new();
    if lo <= hi {
        let make_row = |n: usize, values: &[f64], method: ConstructionMethod| {
            let (counts, info) = latency_counts_for_values(values, config.p_e);
            let pick = |v: Variant| config.variants.contains(&v).then(|| counts.get(v));
            LatencyRow {
                n,
                rate: info as f64 / values.len() as f64,
                latency_sc: pick(Variant::Sc),
                latency_ssc: pick(Variant::Ssc),
                latency_fastssc: pick(Variant::FastSsc),
                method,
            }
        };
        match config.channel.family() {
            ChannelFamily::Bec => {
                for_each_bec_level(config.channel.param(), hi, |n, values| {
                    if n >= lo {
                        rows.push(make_row(n, values, ConstructionMethod::BecExact));
                    }
                })?;
            }
            family => {
                let de_hi = match family {
                    ChannelFamily::Bawgnc => hi.min(GA_THRESHOLD_EXPONENT),
                    _ => hi,
                };
                let tables = de_tables(config, de_hi)?;
                let mut de_rows: Vec<LatencyRow> = tables[lo.min(de_hi + 1)..]
                    .par_iter()
                    .map(|t| make_row(t.n(), t.values(), ConstructionMethod::DensityEvolution))
                    .collect();
                rows.append(&mut de_rows);
                if hi > de_hi {
                    for_each_ga_level(config.channel.param(), hi, |n, means| {
                        if n > de_hi && n >= lo {
                            let z: Vec<f64> = means.iter().map(|&m| ga_z(m)).collect();
                            rows.push(make_row(n, &z, ConstructionMethod::GaussianApproximation));
                        }
                    })?;
                }
            }
        }
    }

    let mut report = LatencyReport {
        family: config.channel.family(),
        param: config.channel.param(),
        p_e: config.p_e,
        resolution: match config.channel.family() {
            ChannelFamily::Bec => 0,
            _ => config.resolution as u32,
        },
        rows,
        fitted_slopes: Vec::new(),
        truncated,
    };
    let window = config.default_window();
    for &variant in &config.variants {
        if let Ok(fit) = fit_slope(&report, variant, window) {
            report.fitted_slopes.push(fit);
        }
    }
    Ok(report)
}

/// Density-evolution tables for `0..=n_max`, through the on-disk cache when
/// one is configured.
fn de_tables(config: &SweepConfig, n_max: usize) -> Result<Vec<ReliabilityTable>, LatencyError> {
    let method = ConstructionMethod::DensityEvolution;
    let res = config.resolution as u32;
    if let Some(dir) = &config.cache_dir {
        let cached: Option<Vec<ReliabilityTable>> = (0..=n_max)
            .map(|n| construction::load_table(dir.join(cache_file_name(config.channel, n, method, res))).ok())
            .collect();
        if let Some(tables) = cached {
            return Ok(tables);
        }
    }
    let tables = construction::de_reliability_levels(config.channel, n_max, config.resolution)?;
    if let Some(dir) = &config.cache_dir {
        std::fs::create_dir_all(dir)?;
        for t in &tables {
            construction::save_table(t, dir.join(cache_file_name(config.channel, t.n(), method, res)))?;
        }
    }
    Ok(tables)
}

/// Ordinary least squares of `log2(latency)` against `n` over the rows whose
/// `n` lies in `window` (inclusive).
pub fn fit_slope(report: &LatencyReport, variant: Variant, window: (usize, usize)) -> Result<SlopeFit, LatencyError> {
    let points: Vec<(f64, f64)> = report
        .rows
        .iter()
        .filter(|r| r.n >= window.0 && r.n <= window.1)
        .filter_map(|r| r.latency(variant).map(|l| (r.n as f64, (l as f64).log2())))
        .collect();
    if points.len() < 4 {
        return Err(LatencyError::WindowTooSmall { lo: window.0, hi: window.1, points: points.len(), variant });
    }
    let (slope, intercept) = ols(&points);
    Ok(SlopeFit { variant, slope, intercept, window })
}

pub fn ols(points: &[(f64, f64)]) -> (f64, f64) {
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    let slope = sxy / sxx;
    (slope, my - slope * mx)
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    family: ChannelFamily,
    param: f64,
    pe: f64,
    n: usize,
    rate: f64,
    latency_sc: Option<u64>,
    latency_ssc: Option<u64>,
    latency_fastssc: Option<u64>,
}

/// CSV rows with header
/// `family,param,pe,n,rate,latency_sc,latency_ssc,latency_fastssc`;
/// variants not swept are left empty.
pub fn write_csv(report: &LatencyReport, writer: impl std::io::Write) -> Result<(), LatencyError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in &report.rows {
        w.serialize(CsvRow {
            family: report.family,
            param: report.param,
            pe: report.p_e,
            n: r.n,
            rate: r.rate,
            latency_sc: r.latency_sc,
            latency_ssc: r.latency_ssc,
            latency_fastssc: r.latency_fastssc,
        })?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a CSV written by [`write_csv`] as `(n, rate, sc, ssc, fastssc)`.
pub fn read_csv_rows(reader: impl std::io::Read) -> Result<Vec<(usize, f64, Option<u64>, Option<u64>, Option<u64>)>, LatencyError> {
    let mut r = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in r.deserialize() {
        let row: CsvRow = rec?;
        out.push((row.n, row.rate, row.latency_sc, row.latency_ssc, row.latency_fastssc));
    }
    Ok(out)
}

pub fn write_json(report: &LatencyReport, writer: impl std::io::Write) -> Result<(), LatencyError> {
    serde_json::to_writer_pretty(writer, report)?;
    Ok(())
}

pub fn read_json(reader: impl std::io::Read) -> Result<LatencyReport, LatencyError> {
    Ok(serde_json::from_reader(reader)?)
}

/// Form of the scaling-exponent condition being checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalingForm {
    /// Any BMS channel: the check-node child may land anywhere in
    /// `[x·sqrt(2 − x²), 2x − x²]`.
    General,
    /// Erasure channel: the check-node child is exactly `2x − x²`.
    Bec,
}

impl std::str::FromStr for ScalingForm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "general" => Ok(ScalingForm::General),
            "bec" => Ok(ScalingForm::Bec),
            other => Err(format!("unknown form '{other}' (expected general or bec)")),
        }
    }
}

/// A function on `[0, 1]` known at increasing sample points and linearly
/// interpolated between them.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl SampledFunction {
    /// Samples must be strictly increasing in `x`, start at 0, end at 1
    /// and be finite. Boundary conditions on `h` are checked separately by
    /// [`check_scaling_candidate`].
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, LatencyError> {
        let bad = |m: &str| Err(LatencyError::InvalidCandidate(m.to_string()));
        if xs.len() != ys.len() || xs.len() < 3 {
            return bad("need at least three (x, h) samples of equal count");
        }
        if xs.windows(2).any(|w| !(w[1] > w[0])) {
            return bad("sample points must be strictly increasing");
        }
        if xs[0] != 0.0 || xs[xs.len() - 1] != 1.0 {
            return bad("samples must span [0, 1] including both endpoints");
        }
        if ys.iter().any(|y| !y.is_finite()) {
            return bad("h values must be finite");
        }
        Ok(SampledFunction { xs, ys })
    }

    /// Why `h` fails `h(0) = h(1) = 0` with `h > 0` inside, if it does.
    pub fn boundary_violation(&self) -> Option<String> {
        let last = self.ys.len() - 1;
        if self.ys[0].abs() > 1e-12 || self.ys[last].abs() > 1e-12 {
            return Some(format!("h(0) = {} and h(1) = {} must both be 0", self.ys[0], self.ys[last]));
        }
        if let Some(i) = (1..last).find(|&i| !(self.ys[i] > 0.0)) {
            return Some(format!("h({}) = {} must be positive", self.xs[i], self.ys[i]));
        }
        None
    }

    /// Sample `h` on `points` equally spaced points of `[0, 1]`.
    pub fn from_fn(h: impl Fn(f64) -> f64, points: usize) -> Result<Self, LatencyError> {
        let xs: Vec<f64> = (0..points).map(|i| i as f64 / (points - 1) as f64).collect();
        let ys = xs.iter().map(|&x| h(x)).collect();
        Self::new(xs, ys)
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, 1.0);
        let k = self.xs.partition_point(|&p| p <= x);
        if k == 0 {
            return self.ys[0];
        }
        if k >= self.xs.len() {
            return self.ys[self.ys.len() - 1];
        }
        let (x0, x1) = (self.xs[k - 1], self.xs[k]);
        let t = (x - x0) / (x1 - x0);
        self.ys[k - 1] + t * (self.ys[k] - self.ys[k - 1])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub sup_ratio: f64,
    pub argmax_x: f64,
    /// `-1 / log2(sup)` when `sup < 1` (beyond rounding); `None` marks an
    /// invalid candidate.
    pub mu_bound: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ScalingGrid {
    pub x_points: usize,
    pub y_points: usize,
}

impl Default for ScalingGrid {
    fn default() -> Self {
        ScalingGrid { x_points: 10_000, y_points: 1_000 }
    }
}

/// Grid supremum over `x ∈ (0, 1)` of `(h(x²) + h(y)) / (2 h(x))`, where
/// `y = 2x − x²` for the BEC and `y` maximizes `h` over
/// `[x·sqrt(2 − x²), 2x − x²]` (grid plus both endpoints) in general.
///
/// Grid points outside the first and last interior samples are skipped:
/// there `h` is a straight line through 0 and the ratio tends to 1 for
/// every candidate, an artifact of the interpolation.
pub fn check_scaling_candidate(h: &SampledFunction, form: ScalingForm, grid: ScalingGrid) -> Result<ScalingCheck, LatencyError> {
    if let Some(why) = h.boundary_violation() {
        return Err(LatencyError::InvalidCandidate(why));
    }
    scaling_sup(h, form, grid)
}

/// The same grid supremum without the boundary-condition check; a result
/// with `sup >= 1` is reported with no μ bound.
pub fn scaling_sup(h: &SampledFunction, form: ScalingForm, grid: ScalingGrid) -> Result<ScalingCheck, LatencyError> {
    if grid.x_points < 1 || (form == ScalingForm::General && grid.y_points < 2) {
        return Err(LatencyError::InvalidArgument("scaling grid too small".into()));
    }
    let ratio_at = |x: f64| -> f64 {
        let hx = h.eval(x);
        let upper = 2.0 * x - x * x;
        let hy = match form {
            ScalingForm::Bec => h.eval(upper),
            ScalingForm::General => {
                let lower = x * (2.0 - x * x).sqrt();
                let inner = (0..grid.y_points).map(|j| {
                    let t = j as f64 / (grid.y_points - 1) as f64;
                    h.eval(lower + t * (upper - lower))
                });
                inner.chain([h.eval(lower), h.eval(upper)]).fold(f64::NEG_INFINITY, f64::max)
            }
        };
        (h.eval(x * x) + hy) / (2.0 * hx)
    };
    let (lo, hi) = (h.xs[1], h.xs[h.xs.len() - 2]);
    let (sup_ratio, argmax_x) = (1..=grid.x_points)
        .into_par_iter()
        .map(|i| i as f64 / (grid.x_points + 1) as f64)
        .filter(|&x| x >= lo && x <= hi)
        .map(|x| (ratio_at(x), x))
        .reduce(|| (f64::NEG_INFINITY, 0.0), |a, b| if b.0 > a.0 || (b.0 == a.0 && b.1 < a.1) { b } else { a });
    if sup_ratio == f64::NEG_INFINITY {
        return Err(LatencyError::InvalidArgument("no grid point lies between the interior samples".into()));
    }
    // rounding can leave an exact sup of 1 a few ulps short of it
    let mu_bound = (sup_ratio < 1.0 - 1e-12).then(|| -1.0 / sup_ratio.log2());
    Ok(ScalingCheck { sup_ratio, argmax_x, mu_bound })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PruningRounds {
    /// Fraction of the polarization steps spent in each round; sums to 1.
    pub deltas: Vec<f64>,
    /// Predicted latency exponent `1 / Σ_{i=0}^{K} μ^{-i}`.
    pub exponent: f64,
}

/// Round lengths `δ_k ∝ μ^{1−k}` (normalized to sum to 1) and the latency
/// exponent they predict.
pub fn pruning_rounds(mu: f64, rounds: usize) -> Result<PruningRounds, LatencyError> {
    if !(mu > 1.0) || rounds == 0 {
        return Err(LatencyError::InvalidArgument(format!("need mu > 1 and K >= 1, got mu = {mu}, K = {rounds}")));
    }
    let raw: Vec<f64> = (1..=rounds).map(|k| mu.powi(1 - k as i32)).collect();
    let total: f64 = raw.iter().sum();
    let deltas = raw.iter().map(|d| d / total).collect();
    let series: f64 = (0..=rounds).map(|i| mu.powi(-(i as i32))).sum();
    Ok(PruningRounds { deltas, exponent: 1.0 / series })
}

/// Fraction of table entries with `2^(−νn) ≤ Z ≤ 1 − 2^(−νn)`.
///
/// The upper test is done as `1 − Z ≥ 2^(−νn)`, which keeps its meaning
/// once `2^(−νn)` drops below the spacing of doubles near 1.
pub fn unpolarized_fraction(table: &ReliabilityTable, nu: f64) -> f64 {
    unpolarized_fraction_of(table.values(), table.n(), nu)
}

pub fn unpolarized_fraction_of(values: &[f64], n: usize, nu: f64) -> f64 {
    let lo = (-nu * n as f64).exp2();
    let inside = values.par_iter().filter(|&&z| z >= lo && 1.0 - z >= lo).count();
    inside as f64 / values.len() as f64
}
