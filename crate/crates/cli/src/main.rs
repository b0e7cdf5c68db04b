//! `plab`: construct polar codes, sweep decoding latency, simulate frame
//! error rates and print decoding schedules.
//!
//! Exit status: 0 on success, 2 for invalid arguments or input files, 3 when
//! a request exceeds the resource budget, 1 for anything else.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use plab_core::channel::{BmsChannel, ChannelError, ChannelFamily, DEFAULT_RESOLUTION};
use plab_core::codec::Variant;
use plab_core::construction::{
    self, cache_file_name, ConstructionError, ConstructionMethod, PolarCode, ReliabilityTable,
    GA_THRESHOLD_EXPONENT,
};
use plab_core::latency::{self, ScalingForm, ScalingGrid, SweepConfig, DEFAULT_DE_CAP};
use plab_core::sim::{run_trials, TrialConfig};

#[derive(Parser, Debug)]
#[command(name = "plab", version, about = "Polar code construction, decoding latency and FER simulation")]
struct Cli {
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a threshold polar code and write its frozen set as JSON.
    Construct(ConstructArgs),
    /// Sweep decoding latency over a range of n.
    Latency(LatencyArgs),
    /// Monte-Carlo frame error rate of a constructed code.
    Simulate(SimulateArgs),
    /// Print the step schedule of a pruned decoding tree.
    Schedule(ScheduleArgs),
    /// Check a candidate function for the scaling-exponent inequality.
    ScalingCheck(ScalingArgs),
}

#[derive(Args, Debug, Clone)]
struct ChannelArgs {
    /// Channel family: bec, bsc or bawgnc.
    #[arg(long)]
    family: ChannelFamily,
    /// Target capacity in (0, 1); the channel parameter is solved for.
    #[arg(long, conflicts_with = "param", required_unless_present = "param")]
    capacity: Option<f64>,
    /// Raw channel parameter (erasure / crossover probability, noise sigma).
    #[arg(long)]
    param: Option<f64>,
    /// Quantization resolution for density evolution.
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    /// Skip the on-disk reliability-table cache.
    #[arg(long)]
    no_cache: bool,
}

#[derive(Args, Debug)]
struct ConstructArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    /// Target block error probability.
    #[arg(long)]
    pe: f64,
    #[arg(long)]
    n: usize,
    /// Output file (stdout if omitted).
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct LatencyArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    pe: f64,
    /// Inclusive range `a..b`, or a single value.
    #[arg(long, value_parser = parse_range)]
    n: RangeInclusive<usize>,
    /// Comma-separated decoder variants.
    #[arg(long, value_delimiter = ',', default_value = "sc,ssc,fastssc")]
    variants: Vec<Variant>,
    /// Largest n computed for the BSC and BAWGNC.
    #[arg(long, default_value_t = DEFAULT_DE_CAP)]
    cap: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Output file (stdout if omitted). In CSV mode a companion `.json`
    /// with the fitted slopes is written next to it.
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    channel: ChannelArgs,
    #[arg(long)]
    pe: f64,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 10_000)]
    trials: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, value_delimiter = ',', default_value = "sc,ssc,fastssc")]
    variants: Vec<Variant>,
    #[arg(long, short)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ScheduleArgs {
    /// Frozen mask as a string of 0/1 characters (1 = frozen).
    #[arg(long, conflicts_with_all = ["frozen", "family"])]
    mask: Option<String>,
    /// Comma-separated one-based frozen positions (with --n).
    #[arg(long, value_delimiter = ',', num_args = 0.., conflicts_with = "family")]
    frozen: Option<Vec<usize>>,
    /// Construct the code from a channel instead (with --pe and --n).
    #[arg(long, requires_all = ["pe", "n"])]
    family: Option<ChannelFamily>,
    #[arg(long)]
    capacity: Option<f64>,
    #[arg(long)]
    param: Option<f64>,
    #[arg(long)]
    pe: Option<f64>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long, default_value = "ssc")]
    variant: Variant,
    /// Print the tokens on one line joined by " -> ".
    #[arg(long)]
    compact: bool,
}

#[derive(Args, Debug)]
struct ScalingArgs {
    /// CSV file of `x,h` samples spanning [0, 1].
    #[arg(long)]
    samples: PathBuf,
    #[arg(long, default_value = "general", value_parser = parse_form)]
    form: ScalingForm,
    #[arg(long, default_value_t = 10_000)]
    x_points: usize,
    #[arg(long, default_value_t = 1_000)]
    y_points: usize,
}

enum Failure {
    Usage(anyhow::Error),
    Resource(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Other(e.into())
    }
}

fn usage(e: impl Into<anyhow::Error>) -> Failure {
    Failure::Usage(e.into())
}

fn construction_failure(e: ConstructionError) -> Failure {
    match e {
        ConstructionError::TooLarge { .. } => Failure::Resource(e.into()),
        ConstructionError::InvalidErrorProbability(_) | ConstructionError::Channel(_) => usage(e),
        other => Failure::Other(other.into()),
    }
}

fn parse_range(s: &str) -> Result<RangeInclusive<usize>, String> {
    let bad = || format!("expected `a..b` or a single integer, got `{s}`");
    match s.split_once("..") {
        Some((a, b)) => {
            let a: usize = a.trim().parse().map_err(|_| bad())?;
            let b: usize = b.trim_start_matches('=').trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(format!("empty range {a}..{b}"));
            }
            Ok(a..=b)
        }
        None => {
            let v: usize = s.trim().parse().map_err(|_| bad())?;
            Ok(v..=v)
        }
    }
}

fn parse_form(s: &str) -> Result<ScalingForm, String> {
    s.parse()
}

fn resolve_channel(family: ChannelFamily, capacity: Option<f64>, param: Option<f64>) -> Result<BmsChannel, Failure> {
    let channel = match (capacity, param) {
        (Some(c), None) => BmsChannel::from_capacity(family, c),
        (None, Some(p)) => BmsChannel::new(family, p),
        _ => return Err(usage(anyhow!("give exactly one of --capacity and --param"))),
    };
    channel.map_err(|e: ChannelError| usage(e))
}

fn check_pe(pe: f64) -> Result<(), Failure> {
    if pe > 0.0 && pe < 1.0 {
        Ok(())
    } else {
        Err(usage(anyhow!("--pe must lie strictly between 0 and 1, got {pe}")))
    }
}

fn cache_dir() -> Option<PathBuf> {
    if let Some(dir) = std::env::var_os("PLAB_CACHE_DIR") {
        return Some(PathBuf::from(dir));
    }
    if let Some(dir) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(dir).join("plab"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("plab"))
}

/// Reliability table for `channel` at exponent `n`, via the cache for
/// density-evolution tables.
fn reliability(channel: BmsChannel, n: usize, resolution: usize, use_cache: bool) -> Result<ReliabilityTable, Failure> {
    let cached_method = match channel.family() {
        ChannelFamily::Bec => None,
        ChannelFamily::Bawgnc if n > GA_THRESHOLD_EXPONENT => None,
        _ => Some(ConstructionMethod::DensityEvolution),
    };
    let path = match (cached_method, use_cache.then(cache_dir).flatten()) {
        (Some(method), Some(dir)) => Some(dir.join(cache_file_name(channel, n, method, resolution as u32))),
        _ => None,
    };
    if let Some(path) = &path {
        if let Ok(table) = construction::load_table(path) {
            return Ok(table);
        }
    }
    let table = construction::de_reliability(channel, n, resolution).map_err(construction_failure)?;
    if let Some(path) = &path {
        // a cache that cannot be written is not an error
        let _ = path.parent().map(std::fs::create_dir_all);
        let _ = construction::save_table(&table, path);
    }
    Ok(table)
}

fn build_code(channel: BmsChannel, pe: f64, n: usize, resolution: usize, use_cache: bool) -> Result<(ReliabilityTable, PolarCode), Failure> {
    check_pe(pe)?;
    let table = reliability(channel, n, resolution, use_cache)?;
    let code = construction::select_frozen(&table, pe).map_err(construction_failure)?;
    Ok((table, code))
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).with_context(|| format!("cannot create {}", p.display()))?,
        )),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn cmd_construct(args: ConstructArgs) -> Result<(), Failure> {
    let ch = &args.channel;
    let channel = resolve_channel(ch.family, ch.capacity, ch.param)?;
    let (table, code) = build_code(channel, args.pe, args.n, ch.resolution, !ch.no_cache)?;
    let one_based = |v: Vec<usize>| v.into_iter().map(|i| i + 1).collect::<Vec<_>>();
    let frozen: Vec<usize> = (0..code.len()).filter(|&i| code.is_frozen(i)).collect();
    let meta = table.meta();
    let doc = json!({
        "n": code.n(),
        "length": code.len(),
        "p_e": args.pe,
        "channel": { "family": channel.family(), "param": channel.param(), "capacity": channel.capacity() },
        "construction": { "method": meta.method, "resolution": meta.resolution },
        "rate": code.rate(),
        "indexing": "one-based",
        "frozen_positions": one_based(frozen),
        "info_positions": one_based(code.info_positions()),
        "union_bound": construction::union_bound(&table, &code),
    });
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &doc).context("writing code JSON")?;
    writeln!(out)?;
    out.flush()?;
    if args.output.is_some() {
        eprintln!("n = {}, rate = {} ({} information bits)", code.n(), code.rate(), code.info_len());
    }
    Ok(())
}

fn cmd_latency(args: LatencyArgs) -> Result<(), Failure> {
    let ch = &args.channel;
    let channel = resolve_channel(ch.family, ch.capacity, ch.param)?;
    check_pe(args.pe)?;
    if args.variants.is_empty() {
        return Err(usage(anyhow!("--variants must name at least one decoder")));
    }
    let mut config = SweepConfig::new(channel, args.pe, args.n.clone());
    config.variants = args.variants.clone();
    config.resolution = ch.resolution;
    config.de_cap = args.cap;
    config.cache_dir = if ch.no_cache { None } else { cache_dir() };
    let report = latency::latency_sweep(&config).map_err(|e| match e {
        latency::LatencyError::Construction(c) => construction_failure(c),
        latency::LatencyError::InvalidArgument(_) => usage(e),
        other => Failure::Other(other.into()),
    })?;

    let mut out = open_output(args.output.as_deref())?;
    match args.format {
        Format::Csv => {
            latency::write_csv(&report, &mut out).context("writing CSV")?;
            if let Some(path) = &args.output {
                let companion = path.with_extension("json");
                latency::write_json(&report, File::create(&companion)?).context("writing companion JSON")?;
            }
        }
        Format::Json => {
            latency::write_json(&report, &mut out).context("writing JSON")?;
            writeln!(out)?;
        }
    }
    out.flush()?;
    for fit in &report.fitted_slopes {
        eprintln!(
            "{} slope over n in [{}, {}]: {:.4} (intercept {:.4})",
            fit.variant, fit.window.0, fit.window.1, fit.slope, fit.intercept
        );
    }
    if let Some(t) = &report.truncated {
        return Err(Failure::Resource(anyhow!("report truncated: {}", t.reason)));
    }
    Ok(())
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Failure> {
    let ch = &args.channel;
    let channel = resolve_channel(ch.family, ch.capacity, ch.param)?;
    if args.trials == 0 {
        return Err(usage(anyhow!("--trials must be at least 1")));
    }
    if args.variants.is_empty() {
        return Err(usage(anyhow!("--variants must name at least one decoder")));
    }
    let (_, code) = build_code(channel, args.pe, args.n, ch.resolution, !ch.no_cache)?;
    let mut config = TrialConfig::new(code, channel, args.trials, args.seed);
    config.variants = args.variants.clone();
    let result = run_trials(&config).map_err(|e| Failure::Other(e.into()))?;
    let mut out = open_output(args.output.as_deref())?;
    serde_json::to_writer_pretty(&mut out, &result).context("writing result JSON")?;
    writeln!(out)?;
    out.flush()?;
    for s in &result.stats {
        eprintln!(
            "{}: {} / {} frame errors, FER {:.3e} [{:.3e}, {:.3e}]",
            s.variant, s.frame_errors, s.trials, s.fer, s.ci_low, s.ci_high
        );
    }
    Ok(())
}

fn schedule_code(args: &ScheduleArgs) -> Result<PolarCode, Failure> {
    if let Some(mask) = &args.mask {
        let bits = mask
            .chars()
            .map(|c| match c {
                '1' => Ok(true),
                '0' => Ok(false),
                other => Err(usage(anyhow!("mask characters must be 0 or 1, found `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        return PolarCode::from_frozen_mask(bits)
            .ok_or_else(|| usage(anyhow!("mask length must be a power of two")));
    }
    let n = args.n.ok_or_else(|| usage(anyhow!("--n is required unless --mask is given")))?;
    if let Some(family) = args.family {
        let pe = args.pe.ok_or_else(|| usage(anyhow!("--pe is required with --family")))?;
        let channel = resolve_channel(family, args.capacity, args.param)?;
        return Ok(build_code(channel, pe, n, args.resolution, true)?.1);
    }
    if n > 24 {
        return Err(Failure::Resource(anyhow!("schedules are printed for n <= 24 only")));
    }
    let len = 1usize << n;
    let mut bits = vec![false; len];
    for &p in args.frozen.as_deref().unwrap_or(&[]) {
        if p == 0 || p > len {
            return Err(usage(anyhow!("frozen position {p} outside 1..={len}")));
        }
        bits[p - 1] = true;
    }
    Ok(PolarCode::from_frozen_mask(bits).expect("power-of-two length"))
}

fn cmd_schedule(args: ScheduleArgs) -> Result<(), Failure> {
    let code = schedule_code(&args)?;
    let tree = latency::build_pruned_tree(&code, args.variant);
    let tokens = latency::schedule(&tree);
    let mut out = BufWriter::new(io::stdout().lock());
    if args.compact {
        writeln!(out, "{}", tokens.join(" -> "))?;
    } else {
        for t in &tokens {
            writeln!(out, "{t}")?;
        }
    }
    out.flush()?;
    Ok(())
}

fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>), Failure> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)?;
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split(',').map(str::trim);
        let (Some(a), Some(b), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(usage(anyhow!("line {}: expected `x,h`", lineno + 1)));
        };
        match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(h)) => {
                xs.push(x);
                ys.push(h);
            }
            // a header line
            _ if xs.is_empty() && lineno == 0 => continue,
            _ => return Err(usage(anyhow!("line {}: `{line}` is not a pair of numbers", lineno + 1))),
        }
    }
    if xs.is_empty() {
        return Err(usage(anyhow!("{} holds no samples", path.display())));
    }
    Ok((xs, ys))
}

/// Nine decimals with trailing zeros dropped (`1.0`, `0.866025404`).
fn short(v: f64) -> String {
    let s = format!("{v:.9}");
    let s = s.trim_end_matches('0');
    if s.ends_with('.') {
        format!("{s}0")
    } else {
        s.to_string()
    }
}

fn cmd_scaling_check(args: ScalingArgs) -> Result<(), Failure> {
    let (xs, ys) = read_samples(&args.samples)?;
    let h = latency::SampledFunction::new(xs, ys).map_err(usage)?;
    let grid = ScalingGrid { x_points: args.x_points, y_points: args.y_points };
    let result = latency::scaling_sup(&h, args.form, grid).map_err(usage)?;
    let violation = h.boundary_violation();
    match (result.mu_bound, violation) {
        (Some(mu), None) => println!("sup={} mu={} (argmax x={})", short(result.sup_ratio), short(mu), short(result.argmax_x)),
        (_, Some(why)) => println!("sup={} invalid ({why})", short(result.sup_ratio)),
        (None, None) => println!("sup={} invalid (sup >= 1)", short(result.sup_ratio)),
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(usage(anyhow!("--threads must be at least 1")));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Other(e.into()))?;
    }
    match cli.command {
        Command::Construct(a) => cmd_construct(a),
        Command::Latency(a) => cmd_latency(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Schedule(a) => cmd_schedule(a),
        Command::ScalingCheck(a) => cmd_scaling_check(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Resource(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
