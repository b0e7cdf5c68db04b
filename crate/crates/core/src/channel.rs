//! Binary-input memoryless symmetric (BMS) channels.
//!
//! [`BmsChannel`] is the parametric description of a transmission channel
//! (BEC, BSC or binary-input AWGN). [`QuantizedBms`] is a finite-alphabet
//! representation of an arbitrary BMS channel as a mixture of binary
//! symmetric sub-channels, which is what density evolution tracks through
//! the polar transforms.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::f64::consts::{LN_2, PI};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Default number of |LLR| levels kept by density evolution.
pub const DEFAULT_RESOLUTION: usize = 64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChannelError {
    #[error("parameter {param} outside the valid range for {family}")]
    ParamOutOfRange { family: ChannelFamily, param: f64 },
    #[error("target capacity {0} must lie strictly inside (0, 1)")]
    CapacityOutOfRange(f64),
    #[error("bisection for {family} capacity {target} did not converge")]
    NoConvergence { family: ChannelFamily, target: f64 },
    #[error("resolution must be at least 2, got {0}")]
    Resolution(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelFamily {
    Bec,
    Bsc,
    Bawgnc,
}

impl ChannelFamily {
    pub const ALL: [ChannelFamily; 3] = [ChannelFamily::Bec, ChannelFamily::Bsc, ChannelFamily::Bawgnc];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelFamily::Bec => "bec",
            ChannelFamily::Bsc => "bsc",
            ChannelFamily::Bawgnc => "bawgnc",
        }
    }

    pub(crate) fn code(self) -> u8 {
        match self {
            ChannelFamily::Bec => 0,
            ChannelFamily::Bsc => 1,
            ChannelFamily::Bawgnc => 2,
        }
    }

    pub(crate) fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(ChannelFamily::Bec),
            1 => Some(ChannelFamily::Bsc),
            2 => Some(ChannelFamily::Bawgnc),
            _ => None,
        }
    }
}

impl fmt::Display for ChannelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ChannelFamily {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "bec" => Ok(ChannelFamily::Bec),
            "bsc" => Ok(ChannelFamily::Bsc),
            "bawgnc" | "awgn" | "biawgn" => Ok(ChannelFamily::Bawgnc),
            other => Err(format!("unknown channel family `{other}`")),
        }
    }
}

/// A BMS channel from one of the three supported families.
///
/// `param` is the erasure probability for the BEC, the crossover
/// probability for the BSC and the noise standard deviation for the
/// BAWGNC (unit-energy antipodal signaling).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BmsChannel {
    family: ChannelFamily,
    param: f64,
}

impl BmsChannel {
    pub fn new(family: ChannelFamily, param: f64) -> Result<Self, ChannelError> {
        let ok = match family {
            ChannelFamily::Bec => (0.0..=1.0).contains(&param),
            ChannelFamily::Bsc => (0.0..=0.5).contains(&param),
            ChannelFamily::Bawgnc => param.is_finite() && param > 0.0,
        };
        if ok {
            Ok(Self { family, param })
        } else {
            Err(ChannelError::ParamOutOfRange { family, param })
        }
    }

    pub fn bec(erasure: f64) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Bec, erasure)
    }

    pub fn bsc(crossover: f64) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Bsc, crossover)
    }

    pub fn bawgnc(sigma: f64) -> Result<Self, ChannelError> {
        Self::new(ChannelFamily::Bawgnc, sigma)
    }

    pub fn family(&self) -> ChannelFamily {
        self.family
    }

    pub fn param(&self) -> f64 {
        self.param
    }

    /// Bhattacharyya parameter `Z(W) = sum_y sqrt(W(y|0) W(y|1))`.
    pub fn bhattacharyya(&self) -> f64 {
        match self.family {
            ChannelFamily::Bec => self.param,
            ChannelFamily::Bsc => 2.0 * (self.param * (1.0 - self.param)).sqrt(),
            ChannelFamily::Bawgnc => (-1.0 / (2.0 * self.param * self.param)).exp(),
        }
    }

    /// Symmetric capacity in bits per channel use.
    pub fn capacity(&self) -> f64 {
        match self.family {
            ChannelFamily::Bec => 1.0 - self.param,
            ChannelFamily::Bsc => 1.0 - binary_entropy(self.param),
            ChannelFamily::Bawgnc => bawgnc_capacity(self.param),
        }
    }

    /// The channel of `family` whose capacity equals `target`.
    ///
    /// Capacity is strictly decreasing in the parameter for every family,
    /// so bisection always converges; the iteration cap only guards
    /// against a broken capacity evaluation.
    pub fn from_capacity(family: ChannelFamily, target: f64) -> Result<Self, ChannelError> {
        if !(target > 0.0 && target < 1.0) {
            return Err(ChannelError::CapacityOutOfRange(target));
        }
        match family {
            ChannelFamily::Bec => Self::bec(1.0 - target),
            ChannelFamily::Bsc => {
                let p = bisect_decreasing(|p| 1.0 - binary_entropy(p), target, 0.0, 0.5, 1e-17)
                    .ok_or(ChannelError::NoConvergence { family, target })?;
                Self::bsc(p)
            }
            ChannelFamily::Bawgnc => {
                // Bisect on ln(sigma); widen the bracket until it holds the target.
                let mut lo = (0.05f64).ln();
                let mut hi = (20.0f64).ln();
                let mut widen = 0;
                while bawgnc_capacity(lo.exp()) < target || bawgnc_capacity(hi.exp()) > target {
                    lo -= 1.0;
                    hi += 1.0;
                    widen += 1;
                    if widen > 40 {
                        return Err(ChannelError::NoConvergence { family, target });
                    }
                }
                let log_sigma =
                    bisect_decreasing(|s| bawgnc_capacity(s.exp()), target, lo, hi, 1e-15)
                        .ok_or(ChannelError::NoConvergence { family, target })?;
                Self::bawgnc(log_sigma.exp())
            }
        }
    }

    /// Degraded finite-alphabet representation with at most `resolution`
    /// |LLR| levels. The BEC and BSC are represented exactly.
    pub fn quantize(&self, resolution: usize) -> Result<QuantizedBms, ChannelError> {
        if resolution < 2 {
            return Err(ChannelError::Resolution(resolution));
        }
        let levels = match self.family {
            ChannelFamily::Bec => {
                let mut v = Vec::with_capacity(2);
                if self.param > 0.0 {
                    v.push(Level::new(0.5, self.param));
                }
                if self.param < 1.0 {
                    v.push(Level::new(0.0, 1.0 - self.param));
                }
                v
            }
            ChannelFamily::Bsc => vec![Level::new(self.param, 1.0)],
            ChannelFamily::Bawgnc => return Ok(quantize_bawgnc(self.param, resolution)),
        };
        Ok(QuantizedBms { levels, resolution })
    }
}

impl fmt::Display for BmsChannel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.family, self.param)
    }
}

pub fn binary_entropy(p: f64) -> f64 {
    if p <= 0.0 || p >= 1.0 {
        0.0
    } else {
        -p * p.log2() - (1.0 - p) * (1.0 - p).log2()
    }
}

/// Capacity of the binary-input AWGN channel with noise deviation `sigma`.
///
/// With `L ~ N(2/sigma^2, 4/sigma^2)` the channel LLR under input 0,
/// `I = 1 - E[log2(1 + e^{-L})]`, integrated with composite Simpson over
/// +-13 standard deviations. The step shrinks with the LLR spread so the
/// softplus knee is always resolved.
pub fn bawgnc_capacity(sigma: f64) -> f64 {
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let half_width = 13.0;
    let intervals = (((2.0 * half_width) * sd.max(1.0) * 100.0).ceil() as usize).max(8000);
    let intervals = intervals + intervals % 2;
    let h = 2.0 * half_width / intervals as f64;
    let integrand = |t: f64| {
        let l = mean + sd * t;
        let softplus = (-l).max(0.0) + (-l.abs()).exp().ln_1p();
        (-0.5 * t * t).exp() * softplus
    };
    let mut acc = integrand(-half_width) + integrand(half_width);
    for k in 1..intervals {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * integrand(-half_width + k as f64 * h);
    }
    let expected = acc * h / 3.0 / (2.0 * PI).sqrt();
    (1.0 - expected / LN_2).clamp(0.0, 1.0)
}

/// Find `x` in `[lo, hi]` with `f(x) = target` for strictly decreasing `f`.
fn bisect_decreasing(
    f: impl Fn(f64) -> f64,
    target: f64,
    mut lo: f64,
    mut hi: f64,
    tol: f64,
) -> Option<f64> {
    for _ in 0..300 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Some(mid);
        }
        if f(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    None
}

/// Magnitude of a log-likelihood ratio, with a dedicated flag for the
/// noiseless symbol instead of a floating infinity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LlrMagnitude {
    Finite(f64),
    Infinite,
}

/// One binary symmetric sub-channel of a [`QuantizedBms`]: crossover
/// probability `crossover` in `[0, 1/2]`, used with probability `prob`.
///
/// `crossover == 0` is the noiseless (infinite-LLR) symbol and
/// `crossover == 1/2` the erasure (zero-LLR) symbol.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Level {
    pub crossover: f64,
    pub prob: f64,
}

impl Level {
    pub fn new(crossover: f64, prob: f64) -> Self {
        Self { crossover, prob }
    }

    pub fn llr_magnitude(&self) -> LlrMagnitude {
        if self.crossover <= 0.0 {
            LlrMagnitude::Infinite
        } else {
            LlrMagnitude::Finite(((1.0 - self.crossover) / self.crossover).ln().max(0.0))
        }
    }

    fn bhattacharyya(&self) -> f64 {
        self.prob * bsc_z(self.crossover)
    }
}

#[inline]
fn bsc_z(crossover: f64) -> f64 {
    2.0 * (crossover * (1.0 - crossover)).sqrt()
}

/// A binary-input symmetric channel given by the distribution of |LLR|
/// under the all-zero input. Levels are kept in canonical order: strictly
/// increasing |LLR| (strictly decreasing crossover).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedBms {
    levels: Vec<Level>,
    resolution: usize,
}

/// Which of the two synthetic channels a polar transform produces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    /// Check-node combination, the worse channel `W^0`.
    Check,
    /// Variable-node combination, the better channel `W^1`.
    Variable,
}

impl Branch {
    pub fn from_bit(bit: u8) -> Self {
        if bit == 0 {
            Branch::Check
        } else {
            Branch::Variable
        }
    }
}

impl QuantizedBms {
    /// Build from raw levels, merging down to `resolution` if needed.
    pub fn from_levels(levels: Vec<Level>, resolution: usize) -> Result<Self, ChannelError> {
        if resolution < 2 {
            return Err(ChannelError::Resolution(resolution));
        }
        Ok(Self { levels: reduce(levels, resolution), resolution })
    }

    pub fn levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// `(|LLR|, probability)` pairs in canonical order.
    pub fn pairs(&self) -> impl Iterator<Item = (LlrMagnitude, f64)> + '_ {
        self.levels.iter().map(|l| (l.llr_magnitude(), l.prob))
    }

    pub fn bhattacharyya(&self) -> f64 {
        self.levels.iter().map(Level::bhattacharyya).sum::<f64>().min(1.0)
    }

    pub fn total_probability(&self) -> f64 {
        self.levels.iter().map(|l| l.prob).sum()
    }

    /// Unmerged output of the one-step polar transform. Both inputs of the
    /// transform are copies of `self`, so each unordered pair of levels is
    /// visited once with doubled weight.
    pub fn transform_unmerged(&self, branch: Branch) -> Vec<Level> {
        let lv = &self.levels;
        let mut out = Vec::with_capacity(match branch {
            Branch::Check => lv.len() * (lv.len() + 1) / 2,
            Branch::Variable => lv.len() * (lv.len() + 1),
        });
        for (i, a) in lv.iter().enumerate() {
            for b in &lv[i..] {
                let weight = if std::ptr::eq(a, b) { a.prob * a.prob } else { 2.0 * a.prob * b.prob };
                let (da, db) = (a.crossover, b.crossover);
                match branch {
                    Branch::Check => {
                        out.push(Level::new(da + db - 2.0 * da * db, weight));
                    }
                    Branch::Variable => {
                        let agree = (1.0 - da) * (1.0 - db) + da * db;
                        let disagree = da * (1.0 - db) + db * (1.0 - da);
                        if agree > 0.0 {
                            out.push(Level::new(da * db / agree, weight * agree));
                        }
                        if disagree > 0.0 {
                            let low = (da * (1.0 - db)).min(db * (1.0 - da));
                            out.push(Level::new(low / disagree, weight * disagree));
                        }
                    }
                }
            }
        }
        out
    }

    /// One polar transform followed by a degrading merge back to the
    /// resolution bound.
    pub fn polar_transform(&self, branch: Branch) -> QuantizedBms {
        QuantizedBms {
            levels: reduce(self.transform_unmerged(branch), self.resolution),
            resolution: self.resolution,
        }
    }
}

/// Bhattacharyya value of an arbitrary (possibly unsorted) level list.
pub fn levels_bhattacharyya(levels: &[Level]) -> f64 {
    levels.iter().map(Level::bhattacharyya).sum()
}

// Monotone approximation of log2 (max error ~1e-3), used only to place
// levels into pre-merge bins.
#[inline]
fn fast_log2(x: f64) -> f64 {
    let bits = x.to_bits();
    let exponent = ((bits >> 52) & 0x7ff) as i64 - 1023;
    let t = f64::from_bits((bits & 0x000f_ffff_ffff_ffff) | 0x3ff0_0000_0000_0000) - 1.0;
    exponent as f64 + t * (1.420_864_537_430_090_3 + t * (-0.577_250_650_806_437_3 + t * 0.156_386_113_376_347))
}

#[inline]
fn bin_key(crossover: f64) -> f64 {
    let llr_bits = (fast_log2(1.0 - crossover) - fast_log2(crossover)).max(0.0);
    fast_log2(1.0 + llr_bits)
}

/// Pre-merge bins per output level.
const BIN_FACTOR: usize = 4;

/// Degrading reduction of a level list to at most `resolution` levels in
/// canonical order.
///
/// Merging two binary symmetric sub-channels into one whose crossover is
/// the probability-weighted mean is a channel degradation, and since
/// `Z(delta)` is concave the merged Bhattacharyya value never decreases.
/// Levels are first pooled into fine bins of |LLR| (an exact merge of
/// identical crossovers is lossless), then adjacent pairs are merged
/// greedily, always picking the pair with the smallest Z increase.
pub(crate) fn reduce(mut levels: Vec<Level>, resolution: usize) -> Vec<Level> {
    levels.retain(|l| l.prob > 0.0);
    let total: f64 = levels.iter().map(|l| l.prob).sum();
    if total <= 0.0 {
        return vec![Level::new(0.5, 1.0)];
    }

    let mut perfect = 0.0;
    let mut finite: Vec<Level> = Vec::with_capacity(levels.len());
    for l in levels {
        if l.crossover <= 0.0 {
            perfect += l.prob;
        } else {
            finite.push(Level::new(l.crossover.min(0.5), l.prob));
        }
    }

    let budget = if perfect > 0.0 { resolution - 1 } else { resolution };
    let mut pooled = if finite.len() <= BIN_FACTOR * budget {
        exact_pool(finite)
    } else {
        bin_pool(finite, BIN_FACTOR * budget)
    };
    if perfect > 0.0 {
        pooled.push(Level::new(0.0, perfect));
    }
    let mut merged = exact_pool(greedy_merge(pooled, resolution));
    for l in &mut merged {
        l.prob /= total;
    }
    merged
}

/// Sort by decreasing crossover and merge exact duplicates.
fn exact_pool(mut levels: Vec<Level>) -> Vec<Level> {
    levels.sort_by(|a, b| b.crossover.total_cmp(&a.crossover));
    let mut out: Vec<Level> = Vec::with_capacity(levels.len());
    for l in levels {
        match out.last_mut() {
            Some(last) if last.crossover == l.crossover => last.prob += l.prob,
            _ => out.push(l),
        }
    }
    out
}

/// Pool levels into `bins` buckets uniform in `log2(1 + |LLR| in bits)`.
fn bin_pool(levels: Vec<Level>, bins: usize) -> Vec<Level> {
    let keys: Vec<f64> = levels.iter().map(|l| bin_key(l.crossover)).collect();
    let (mut kmin, mut kmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for &k in &keys {
        kmin = kmin.min(k);
        kmax = kmax.max(k);
    }
    let span = kmax - kmin;
    if span <= 0.0 {
        return exact_pool(levels);
    }
    let scale = (bins as f64 - 1e-9) / span;
    // (probability, probability-weighted crossover)
    let mut acc = vec![(0.0f64, 0.0f64); bins];
    for (l, &k) in levels.iter().zip(&keys) {
        let b = (((k - kmin) * scale) as usize).min(bins - 1);
        acc[b].0 += l.prob;
        acc[b].1 += l.prob * l.crossover;
    }
    acc.into_iter()
        .filter(|&(p, _)| p > 0.0)
        .map(|(p, pd)| Level::new((pd / p).min(0.5), p))
        .collect()
}

#[inline]
fn merged_level(a: Level, b: Level) -> Level {
    let p = a.prob + b.prob;
    Level::new(((a.prob * a.crossover + b.prob * b.crossover) / p).min(0.5), p)
}

#[inline]
fn merge_cost(a: Level, b: Level) -> f64 {
    (merged_level(a, b).bhattacharyya() - a.bhattacharyya() - b.bhattacharyya()).max(0.0)
}

/// Greedy adjacent-pair merging of a list sorted by decreasing crossover.
fn greedy_merge(mut levels: Vec<Level>, resolution: usize) -> Vec<Level> {
    let count = levels.len();
    if count <= resolution {
        return levels;
    }
    const NONE: usize = usize::MAX;
    let mut next: Vec<usize> = (1..=count).map(|i| if i == count { NONE } else { i }).collect();
    let mut prev: Vec<usize> = (0..count).map(|i| if i == 0 { NONE } else { i - 1 }).collect();
    let mut alive = vec![true; count];
    let mut version = vec![0u32; count];
    // Non-negative f64 order matches the order of their bit patterns.
    let mut heap: BinaryHeap<Reverse<(u64, usize, u32)>> = BinaryHeap::with_capacity(count);
    for i in 0..count - 1 {
        heap.push(Reverse((merge_cost(levels[i], levels[i + 1]).to_bits(), i, 0)));
    }
    let mut remaining = count;
    while remaining > resolution {
        let Some(Reverse((_, i, ver))) = heap.pop() else { break };
        if !alive[i] || version[i] != ver || next[i] == NONE {
            continue;
        }
        let j = next[i];
        levels[i] = merged_level(levels[i], levels[j]);
        alive[j] = false;
        next[i] = next[j];
        if next[j] != NONE {
            prev[next[j]] = i;
        }
        remaining -= 1;
        version[i] += 1;
        if next[i] != NONE {
            heap.push(Reverse((merge_cost(levels[i], levels[next[i]]).to_bits(), i, version[i])));
        }
        let p = prev[i];
        if p != NONE {
            version[p] += 1;
            heap.push(Reverse((merge_cost(levels[p], levels[i]).to_bits(), p, version[p])));
        }
    }
    levels
        .into_iter()
        .zip(alive)
        .filter_map(|(l, a)| a.then_some(l))
        .collect()
}

/// Upper tail of the standard normal distribution.
fn normal_tail(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Fine-grid degraded quantization of the BAWGNC |LLR| density, reduced
/// greedily to `resolution` levels.
///
/// Each grid cell `[a, b)` of |LLR| values becomes one binary symmetric
/// level whose crossover is the exact conditional probability of a
/// negative LLR given `|L|` in the cell.
fn quantize_bawgnc(sigma: f64, resolution: usize) -> QuantizedBms {
    let mean = 2.0 / (sigma * sigma);
    let sd = 2.0 / sigma;
    let upper = mean + 14.0 * sd;
    let cells = 64 * resolution.max(64);
    let width = upper / cells as f64;
    let mut levels = Vec::with_capacity(cells + 1);
    for k in 0..=cells {
        let a = k as f64 * width;
        let pos_a = normal_tail((a - mean) / sd);
        let neg_a = normal_tail((a + mean) / sd);
        let (pos, neg) = if k == cells {
            (pos_a, neg_a)
        } else {
            let b = a + width;
            (pos_a - normal_tail((b - mean) / sd), neg_a - normal_tail((b + mean) / sd))
        };
        let p = pos + neg;
        if p > 0.0 {
            levels.push(Level::new((neg / p).clamp(0.0, 0.5), p));
        }
    }
    let levels = reduce(levels, resolution);
    QuantizedBms { levels, resolution }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn approx(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    // Independent oracles: direct two-output sum for the BSC, trapezoid
    // quadrature of sqrt(W(y|0) W(y|1)) for the BAWGNC.
    fn bsc_z_direct(p: f64) -> f64 {
        // outputs y = 0 and y = 1
        (((1.0 - p) * p).sqrt()) + ((p * (1.0 - p)).sqrt())
    }

    fn bawgnc_z_quadrature(sigma: f64) -> f64 {
        let pdf = |y: f64, x: f64| (-(y - x) * (y - x) / (2.0 * sigma * sigma)).exp() / (sigma * (2.0 * PI).sqrt());
        let (lo, hi, steps) = (-30.0, 30.0, 200_000);
        let h = (hi - lo) / steps as f64;
        (0..=steps)
            .map(|k| {
                let y = lo + k as f64 * h;
                let w = if k == 0 || k == steps { 0.5 } else { 1.0 };
                w * (pdf(y, 1.0) * pdf(y, -1.0)).sqrt()
            })
            .sum::<f64>()
            * h
    }

    #[test]
    fn bhattacharyya_closed_forms() {
        assert_eq!(BmsChannel::bec(0.5).unwrap().bhattacharyya(), 0.5);
        let bsc = BmsChannel::bsc(0.11).unwrap().bhattacharyya();
        assert!(approx(bsc, 0.625_779_513_886_480_6, 1e-15));
        assert!(approx(bsc, bsc_z_direct(0.11), 1e-15));
        let awgn = BmsChannel::bawgnc(1.0).unwrap().bhattacharyya();
        assert!(approx(awgn, 0.606_530_659_712_633_4, 1e-15));
        assert!(approx(awgn, bawgnc_z_quadrature(1.0), 1e-10));
    }

    #[test]
    fn capacities() {
        assert_eq!(BmsChannel::bec(0.5).unwrap().capacity(), 0.5);
        // 1 - h2(0.11), evaluated with 30-digit arithmetic
        assert!(approx(BmsChannel::bsc(0.11).unwrap().capacity(), 0.500_084_041_835_472, 1e-14));
        // high-precision adaptive quadrature reference values
        assert!(approx(bawgnc_capacity(1.0), 0.485_944_154_132_935_3, 1e-10));
        assert!(approx(bawgnc_capacity(0.5), 0.912_822_285_774_482_2, 1e-10));
        assert!(BmsChannel::bawgnc(1e6).unwrap().capacity() < 1e-10);
    }

    #[test]
    fn capacity_inversion() {
        let bec = BmsChannel::from_capacity(ChannelFamily::Bec, 0.5).unwrap();
        assert_eq!(bec.param(), 0.5);
        let bsc = BmsChannel::from_capacity(ChannelFamily::Bsc, 0.5).unwrap();
        assert!(approx(bsc.param(), 0.110_027_864_438_359_55, 1e-12));
        let awgn = BmsChannel::from_capacity(ChannelFamily::Bawgnc, 0.5).unwrap();
        assert!(approx(awgn.param(), 0.978_694_124_615_701_2, 1e-9));
        assert!(approx(awgn.capacity(), 0.5, 1e-9));
    }

    #[test]
    fn capacity_out_of_range() {
        for t in [0.0, 1.0, -0.1, f64::NAN] {
            assert!(BmsChannel::from_capacity(ChannelFamily::Bsc, t).is_err());
        }
        assert!(BmsChannel::bsc(0.6).is_err());
        assert!(BmsChannel::bec(1.1).is_err());
        assert!(BmsChannel::bawgnc(0.0).is_err());
    }

    #[test]
    fn quantize_exact_families() {
        let q = BmsChannel::bsc(0.11).unwrap().quantize(16).unwrap();
        let pairs: Vec<_> = q.pairs().collect();
        assert_eq!(pairs.len(), 1);
        match pairs[0] {
            (LlrMagnitude::Finite(m), p) => {
                assert!(approx(m, (0.89f64 / 0.11).ln(), 1e-12));
                assert_eq!(p, 1.0);
            }
            _ => panic!("expected finite level"),
        }

        let q = BmsChannel::bec(0.5).unwrap().quantize(16).unwrap();
        let pairs: Vec<_> = q.pairs().collect();
        assert_eq!(pairs, vec![(LlrMagnitude::Finite(0.0), 0.5), (LlrMagnitude::Infinite, 0.5)]);
        assert!(BmsChannel::bec(0.5).unwrap().quantize(1).is_err());
    }

    #[test]
    fn quantize_bawgnc_is_conservative() {
        let sigma = 0.978_694_124_615_701_2;
        let ch = BmsChannel::bawgnc(sigma).unwrap();
        let q = ch.quantize(64).unwrap();
        assert!(q.len() <= 64);
        assert!(approx(q.total_probability(), 1.0, 1e-12));
        let z = q.bhattacharyya();
        assert!(z >= ch.bhattacharyya());
        assert!(z - ch.bhattacharyya() < 1e-3, "z={z}");
    }

    #[test]
    fn quantize_monotone_in_resolution() {
        let ch = BmsChannel::bawgnc(1.1).unwrap();
        let zs: Vec<f64> = [4, 8, 16, 32, 64, 128, 256].iter().map(|&r| ch.quantize(r).unwrap().bhattacharyya()).collect();
        for w in zs.windows(2) {
            assert!(w[1] <= w[0], "{zs:?}");
        }
    }

    #[test]
    fn bec_check_transform_is_exact() {
        for eps in [0.1, 0.5, 0.77] {
            let q = BmsChannel::bec(eps).unwrap().quantize(16).unwrap();
            let z = eps;
            assert!(approx(q.polar_transform(Branch::Check).bhattacharyya(), 2.0 * z - z * z, 1e-15));
            assert!(approx(q.polar_transform(Branch::Variable).bhattacharyya(), z * z, 1e-15));
        }
    }

    #[test]
    fn bsc_check_transform_bracket() {
        let q = BmsChannel::bsc(0.11).unwrap().quantize(64).unwrap();
        let z = q.bhattacharyya();
        let z0 = q.polar_transform(Branch::Check).bhattacharyya();
        assert!(z0 >= z * (2.0 - z * z).sqrt() - 1e-12 && z0 <= 2.0 * z - z * z + 1e-12, "{z0}");
        // BSC check-node output is again a BSC with crossover 2p(1-p)
        assert!(approx(z0, bsc_z(2.0 * 0.11 * 0.89), 1e-15));
    }

    #[test]
    fn merged_output_is_canonical() {
        let q = BmsChannel::bawgnc(0.9).unwrap().quantize(32).unwrap();
        let mut cur = q;
        for bit in [0u8, 1, 1, 0, 1, 0, 0] {
            cur = cur.polar_transform(Branch::from_bit(bit));
            assert!(cur.len() <= 32);
            assert!(approx(cur.total_probability(), 1.0, 1e-12));
            for w in cur.levels().windows(2) {
                assert!(w[0].crossover > w[1].crossover);
            }
        }
    }

    fn arb_quantized() -> impl Strategy<Value = QuantizedBms> {
        prop::collection::vec((0.0f64..=0.5, 0.01f64..1.0), 1..12).prop_map(|raw| {
            let total: f64 = raw.iter().map(|r| r.1).sum();
            let levels = raw.into_iter().map(|(d, p)| Level::new(d, p / total)).collect();
            QuantizedBms::from_levels(levels, 64).unwrap()
        })
    }

    proptest! {
        #[test]
        fn polar_bracket_holds(q in arb_quantized()) {
            let z = q.bhattacharyya();
            let minus = levels_bhattacharyya(&q.transform_unmerged(Branch::Check));
            let plus = levels_bhattacharyya(&q.transform_unmerged(Branch::Variable));
            prop_assert!((plus - z * z).abs() <= 1e-10);
            prop_assert!(minus >= z * (2.0 - z * z).sqrt() - 1e-10);
            prop_assert!(minus <= 2.0 * z - z * z + 1e-10);
            // merging only ever degrades
            prop_assert!(q.polar_transform(Branch::Check).bhattacharyya() >= minus - 1e-12);
            prop_assert!(q.polar_transform(Branch::Variable).bhattacharyya() >= plus - 1e-12);
        }

        #[test]
        fn capacity_roundtrip(fam in 0u8..3, x in 0.0f64..1.0) {
            let ch = match fam {
                0 => BmsChannel::bec(0.01 + 0.98 * x).unwrap(),
                1 => BmsChannel::bsc(0.01 + 0.44 * x).unwrap(),
                _ => BmsChannel::bawgnc(0.3 + 2.7 * x).unwrap(),
            };
            let back = BmsChannel::from_capacity(ch.family(), ch.capacity()).unwrap();
            prop_assert!((back.param() - ch.param()).abs() <= 1e-8, "{} vs {}", back.param(), ch.param());
        }

        #[test]
        fn figures_of_merit_in_unit_interval(fam in 0u8..3, x in 0.0f64..1.0) {
            let ch = match fam {
                0 => BmsChannel::bec(x).unwrap(),
                1 => BmsChannel::bsc(0.5 * x).unwrap(),
                _ => BmsChannel::bawgnc(0.05 + 10.0 * x).unwrap(),
            };
            prop_assert!((0.0..=1.0).contains(&ch.bhattacharyya()));
            prop_assert!((0.0..=1.0).contains(&ch.capacity()));
        }
    }
}
