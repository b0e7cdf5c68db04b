//! Monte-Carlo frame-error simulation.
//!
//! Every trial draws its own random stream from `(seed, trial index)`, so a
//! run is reproducible bit for bit whatever the number of worker threads.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{BmsChannel, ChannelFamily};
use crate::codec::{encode, CheckRule, Decoder, Variant, LLR_SATURATION};
use crate::construction::PolarCode;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("at least one trial is required")]
    NoTrials,
    #[error("no decoder variant selected")]
    NoVariants,
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Channel output LLRs for one codeword.
pub fn transmit<R: Rng + ?Sized>(codeword: &[u8], channel: &BmsChannel, rng: &mut R) -> Vec<f64> {
    let sign = |bit: u8, mag: f64| if bit == 0 { mag } else { -mag };
    let p = channel.param();
    match channel.family() {
        ChannelFamily::Bec => codeword
            .iter()
            .map(|&x| if rng.gen::<f64>() < p { 0.0 } else { sign(x, LLR_SATURATION) })
            .collect(),
        ChannelFamily::Bsc => {
            let mag = ((1.0 - p) / p).ln();
            let mag = if mag.is_finite() { mag } else { LLR_SATURATION };
            codeword
                .iter()
                .map(|&x| {
                    let y = if rng.gen::<f64>() < p { x ^ 1 } else { x };
                    sign(y, mag)
                })
                .collect()
        }
        ChannelFamily::Bawgnc => codeword
            .iter()
            .map(|&x| {
                let noise: f64 = rng.sample(StandardNormal);
                let y = 1.0 - 2.0 * x as f64 + p * noise;
                2.0 * y / (p * p)
            })
            .collect(),
    }
}

/// RNG of trial `index` in a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone)]
pub struct TrialConfig {
    pub code: PolarCode,
    pub channel: BmsChannel,
    pub trials: u64,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub rule: CheckRule,
}

impl TrialConfig {
    pub fn new(code: PolarCode, channel: BmsChannel, trials: u64, seed: u64) -> Self {
        TrialConfig { code, channel, trials, seed, variants: Variant::ALL.to_vec(), rule: CheckRule::Exact }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VariantStats {
    pub variant: Variant,
    pub frame_errors: u64,
    pub trials: u64,
    pub fer: f64,
    /// Wilson 95% interval.
    pub ci_low: f64,
    pub ci_high: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub rate: f64,
    pub info_bits: usize,
    pub p_e: Option<f64>,
    pub channel: BmsChannel,
    pub trials: u64,
    pub seed: u64,
    pub variants: Vec<Variant>,
    pub rule: CheckRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FerResult {
    pub config: ConfigEcho,
    pub stats: Vec<VariantStats>,
    /// `agreement[a][b]`: trials on which variants `a` and `b` (in the
    /// order of `config.variants`) returned identical û.
    pub agreement: Vec<Vec<u64>>,
    pub wall_clock_seconds: f64,
}

impl FerResult {
    pub fn stats_for(&self, variant: Variant) -> Option<&VariantStats> {
        self.stats.iter().find(|s| s.variant == variant)
    }

    pub fn agreement_between(&self, a: Variant, b: Variant) -> Option<u64> {
        let i = self.config.variants.iter().position(|&v| v == a)?;
        let j = self.config.variants.iter().position(|&v| v == b)?;
        Some(self.agreement[i][j])
    }

    pub fn to_json(&self) -> Result<String, SimError> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(errors: u64, trials: u64) -> (f64, f64) {
    const Z: f64 = 1.959_963_984_540_054;
    let n = trials as f64;
    let p = errors as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = Z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    let lo = if errors == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if errors == trials { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

#[derive(Clone)]
struct Tally {
    errors: Vec<u64>,
    agree: Vec<u64>,
}

impl Tally {
    fn new(k: usize) -> Self {
        Tally { errors: vec![0; k], agree: vec![0; k * k] }
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (a, b) in self.errors.iter_mut().zip(other.errors) {
            *a += b;
        }
        for (a, b) in self.agree.iter_mut().zip(other.agree) {
            *a += b;
        }
        self
    }
}

/// Run `config.trials` independent transmissions and decode each with every
/// requested variant. A frame error is any wrong information bit.
pub fn run_trials(config: &TrialConfig) -> Result<FerResult, SimError> {
    if config.trials == 0 {
        return Err(SimError::NoTrials);
    }
    if config.variants.is_empty() {
        return Err(SimError::NoVariants);
    }
    let start = Instant::now();
    let k = config.variants.len();
    let info = config.code.info_positions();

    let tally = (0..config.trials)
        .into_par_iter()
        .fold(
            || {
                let decoders: Vec<Decoder> = config
                    .variants
                    .iter()
                    .map(|&v| Decoder::with_rule(&config.code, v, config.rule))
                    .collect();
                (decoders, Tally::new(k))
            },
            |(mut decoders, mut tally), t| {
                let mut rng = trial_rng(config.seed, t);
                let u: Vec<u8> = (0..info.len()).map(|_| rng.gen::<bool>() as u8).collect();
                let x = encode(&u, &config.code).expect("info length matches the code");
                let llr = transmit(&x, &config.channel, &mut rng);
                let outputs: Vec<Vec<u8>> = decoders
                    .iter_mut()
                    .map(|d| d.decode(&llr).expect("llr length matches the code").u_hat)
                    .collect();
                for (v, out) in outputs.iter().enumerate() {
                    if info.iter().zip(&u).any(|(&pos, &bit)| out[pos] != bit) {
                        tally.errors[v] += 1;
                    }
                    for (w, other) in outputs.iter().enumerate() {
                        if out == other {
                            tally.agree[v * k + w] += 1;
                        }
                    }
                }
                (decoders, tally)
            },
        )
        .map(|(_, tally)| tally)
        .reduce(|| Tally::new(k), Tally::merge);

    let stats = config
        .variants
        .iter()
        .zip(&tally.errors)
        .map(|(&variant, &frame_errors)| {
            let (ci_low, ci_high) = wilson_interval(frame_errors, config.trials);
            VariantStats {
                variant,
                frame_errors,
                trials: config.trials,
                fer: frame_errors as f64 / config.trials as f64,
                ci_low,
                ci_high,
            }
        })
        .collect();
    let agreement = tally.agree.chunks(k).map(|row| row.to_vec()).collect();

    Ok(FerResult {
        config: ConfigEcho {
            n: config.code.n(),
            rate: config.code.rate(),
            info_bits: info.len(),
            p_e: config.code.construction().map(|c| c.p_e),
            channel: config.channel,
            trials: config.trials,
            seed: config.seed,
            variants: config.variants.clone(),
            rule: config.rule,
        },
        stats,
        agreement,
        wall_clock_seconds: start.elapsed().as_secs_f64(),
    })
}
