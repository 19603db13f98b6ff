//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on invalid input or configuration, 2 when a
//! checked inequality is violated or a witness fails to reproduce.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analysis::{
    self, certify::Statistic, emdm, families, qi, CertifyConfig, EventMetric,
};
use crate::error::{Error, Result};
use crate::events::EventSequence;
use crate::io;
use crate::norms::{self, NormKind};
use crate::sampler::{if_sample, lc_sample, sod_sample, Threshold};
use crate::signal::{Current, Signal};
use crate::spike_metrics::{
    schreiber_distance, van_rossum, victor_purpura, SchreiberKernel, SchreiberParams,
    SimilarityToDistance, VanRossumParams, VictorPurpuraParams, VpSignMode,
};
use crate::structure::{chain_decompose, mmd_intervals, pi_map};

#[derive(Debug, Parser)]
#[command(name = "sodmetric", version, about = "Send-on-delta sampling and event-sequence metrics")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a signal into an events CSV.
    Sample(SampleArgs),
    /// Norm of an event sequence.
    Norm(NormArgs),
    /// Distance between two event sequences.
    Distance(DistanceArgs),
    /// MMD intervals, chain decomposition or the Π map.
    Decompose(DecomposeArgs),
    /// Discontinuity sweeps and characterization.
    Emdm(EmdmArgs),
    /// Quasi-isometry check on a seeded random corpus.
    QiCheck(QiArgs),
    /// Equivalence certification of a norm against the discrepancy norm.
    Certify(CertifyArgs),
    /// Left-continuity probe of the sampler in the threshold.
    ProbeContinuity(ProbeArgs),
    /// Write a built-in signal or event sequence.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Scheme {
    Sod,
    Lc,
    If,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Signal JSON (for `if`, the input current).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub theta: f64,
    #[arg(long, value_enum, default_value = "sod")]
    pub scheme: Scheme,
    /// Events CSV; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EventsInput {
    #[arg(long)]
    pub events: PathBuf,
    /// Overrides the `.meta.json` sidecar.
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    #[command(flatten)]
    pub input: EventsInput,
    #[arg(long, default_value = "D")]
    pub kind: NormKind,
    /// Quadratic interval enumeration instead of the prefix-sum range.
    #[arg(long)]
    pub bruteforce: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetricName {
    Vr,
    Schreiber,
    Vp,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum KernelName {
    Gaussian,
    Causal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MapName {
    OneMinusS,
    Arccos,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VpMode {
    Separate,
    Combined,
}

impl From<VpMode> for VpSignMode {
    fn from(m: VpMode) -> Self {
        match m {
            VpMode::Separate => VpSignMode::Separate,
            VpMode::Combined => VpSignMode::Combined,
        }
    }
}

#[derive(Debug, Args)]
pub struct DistanceArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub horizon: Option<f64>,
    #[arg(long, value_enum)]
    pub metric: MetricName,
    /// Decay rate for `vr` and the causal Schreiber kernel.
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Shift cost for `vp`.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Width of the Gaussian Schreiber kernel.
    #[arg(long, default_value_t = 0.1)]
    pub sigma: f64,
    #[arg(long, value_enum, default_value = "gaussian")]
    pub kernel: KernelName,
    #[arg(long, value_enum, default_value = "one-minus-s")]
    pub map: MapName,
    #[arg(long, value_enum, default_value = "separate")]
    pub vp_mode: VpMode,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Decomposition {
    Mmd,
    Chain,
    Pi,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[command(flatten)]
    pub input: EventsInput,
    #[arg(long, value_enum)]
    pub what: Decomposition,
    /// JSON report; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ReportOut {
    /// JSON report; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Flat per-row CSV for plotting.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EmdmArgs {
    /// D, A, M, vr or vp.
    #[arg(long, default_value = "D")]
    pub metric: String,
    /// `α` for vr, `s` for vp.
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Signal JSON files to sweep; the built-in adversarial family is used
    /// when none are given.
    #[arg(long = "input")]
    pub inputs: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2,0.25,0.5,1")]
    pub thetas: Vec<f64>,
    /// Increments relative to `ϑ`, descending.
    #[arg(long, value_delimiter = ',', default_value = "1e-1,1e-2,1e-3,1e-4,1e-5,1e-6")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 200)]
    pub n_max: usize,
    #[arg(long, value_delimiter = ',', default_value = "10,20,40")]
    pub horizons: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "0.5,1")]
    pub spacings: Vec<f64>,
    #[command(flatten)]
    pub output: ReportOut,
}

#[derive(Debug, Args)]
pub struct QiArgs {
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0.1)]
    pub theta: f64,
    #[arg(long, default_value = "D")]
    pub norm: NormKind,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    #[arg(long, default_value_t = 12)]
    pub max_breaks: usize,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[command(flatten)]
    pub output: ReportOut,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value = "D")]
    pub norm: NormKind,
    #[arg(long, value_delimiter = ',', default_value = "8,16,32,64,128")]
    pub sizes: Vec<usize>,
    #[arg(long, default_value_t = 4)]
    pub random_per_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub output: ReportOut,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Signal JSON; the one-peak signal of height 1 when omitted.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub theta0: f64,
    #[arg(long, default_value_t = 30)]
    pub steps: usize,
    #[command(flatten)]
    pub output: ReportOut,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum Generated {
    RampPlateau,
    Sine,
    RandomWalk,
    Comb,
    LocalMax,
    Alternating,
    Mmsn,
    AllPositive,
    RandomUnit,
    RandomPure,
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub kind: Generated,
    /// Signal JSON or events CSV depending on the kind.
    #[arg(long)]
    pub out: PathBuf,
    /// Horizon for signals and `random-pure`.
    #[arg(long, default_value_t = 1.0)]
    pub horizon: f64,
    /// Event count, comb teeth, random-walk breakpoints or sine points per period.
    #[arg(long, default_value_t = 10)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Peak height, walk amplitude or `ϑ` for `random-pure`.
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
}

/// What a successful run produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    /// A checked inequality failed; artifacts were still written.
    AssertionFailed,
}

fn theta(value: f64) -> Result<Threshold> {
    Threshold::new(value)
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>, stdout: &mut dyn Write) -> Result<()> {
    match out {
        Some(p) => io::write_json(p, value),
        None => Ok(stdout.write_all(io::to_json_pretty(value)?.as_bytes())?),
    }
}

fn emit_csv<R: Serialize>(rows: &[R], out: Option<&Path>) -> Result<()> {
    let Some(path) = out else { return Ok(()) };
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Parse(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Parse(e.to_string()))?;
    io::atomic_write(path, &bytes)
}

fn sample(args: &SampleArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let th = theta(args.theta)?;
    let eta = match args.scheme {
        Scheme::Sod => sod_sample(&io::read_json::<Signal>(&args.input)?, th),
        Scheme::Lc => lc_sample(&io::read_json::<Signal>(&args.input)?, th),
        Scheme::If => if_sample(&io::read_json::<Current>(&args.input)?, th),
    };
    match &args.out {
        Some(p) => io::write_events(p, &eta)?,
        None => stdout.write_all(io::events_to_csv(&eta).as_bytes())?,
    }
    Ok(Outcome::Ok)
}

fn read(input: &EventsInput) -> Result<EventSequence> {
    io::read_events(&input.events, input.horizon)
}

fn norm(args: &NormArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let eta = read(&args.input)?;
    let value = if args.bruteforce {
        match args.kind {
            NormKind::Discrepancy => norms::discrepancy_bruteforce(&eta.amplitudes())?,
            other => {
                return Err(Error::Unsupported(format!("--bruteforce applies to D only, not {other}")))
            }
        }
    } else {
        args.kind.of(&eta)
    };
    writeln!(stdout, "{value}")?;
    Ok(Outcome::Ok)
}

fn distance(args: &DistanceArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let a = io::read_events(&args.a, args.horizon)?;
    let b = io::read_events(&args.b, args.horizon)?;
    let value = match args.metric {
        MetricName::Vr => van_rossum(&a, &b, VanRossumParams::new(args.alpha)?)?,
        MetricName::Vp => victor_purpura(&a, &b, VictorPurpuraParams::new(args.s, args.vp_mode.into())?)?,
        MetricName::Schreiber => {
            let kernel = match args.kernel {
                KernelName::Gaussian => SchreiberKernel::Gaussian { sigma: args.sigma },
                KernelName::Causal => SchreiberKernel::CausalExponential { alpha: args.alpha },
            };
            let map = match args.map {
                MapName::OneMinusS => SimilarityToDistance::OneMinusS,
                MapName::Arccos => SimilarityToDistance::Arccos,
            };
            schreiber_distance(&a, &b, SchreiberParams::new(kernel, map)?)?
        }
    };
    writeln!(stdout, "{value}")?;
    Ok(Outcome::Ok)
}

fn decompose(args: &DecomposeArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let eta = read(&args.input)?;
    let out = args.out.as_deref();
    match args.what {
        Decomposition::Mmd => emit_json(&mmd_intervals(&eta)?, out, stdout)?,
        Decomposition::Chain => emit_json(&chain_decompose(&eta)?, out, stdout)?,
        Decomposition::Pi => emit_json(&pi_map(&eta)?, out, stdout)?,
    }
    Ok(Outcome::Ok)
}

/// Curated signals with critical thresholds at `0.25`, `0.5` and `1`.
pub fn adversarial_family() -> Result<Vec<(String, Signal)>> {
    Ok(vec![
        ("local_max".into(), Signal::local_max(1.0)?),
        ("max_then_min".into(), Signal::max_then_min(1.0)?),
        ("comb_4".into(), Signal::extrema_comb(4.0, 4, 1.0)?),
        ("comb_8_half".into(), Signal::extrema_comb(4.0, 8, 0.5)?),
        ("ramp_plateau".into(), Signal::ramp_plateau(1.0)?),
        ("sine".into(), Signal::sine_pwl(12.0, 16)?),
    ])
}

#[derive(Serialize)]
struct EmdmRow<'a> {
    signal: &'a str,
    theta: f64,
    count: usize,
    limit_count: usize,
    limit_value: f64,
    eps: f64,
    eps_count: usize,
    eps_value: f64,
    matches_limit_pattern: bool,
}

fn emdm_cmd(args: &EmdmArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let metric = EventMetric::parse(&args.metric, args.rate)?;
    let signals = if args.inputs.is_empty() {
        adversarial_family()?
    } else {
        args.inputs
            .iter()
            .map(|p| Ok((p.display().to_string(), io::read_json::<Signal>(p)?)))
            .collect::<Result<Vec<_>>>()?
    };
    let report = emdm::emdm_report(
        &signals,
        metric,
        &args.thetas,
        &args.eps,
        args.n_max,
        &args.horizons,
        &args.spacings,
    )?;
    let rows: Vec<EmdmRow> = report
        .signals
        .iter()
        .flat_map(|s| {
            s.sweep.rows.iter().flat_map(move |r| {
                r.series.iter().map(move |p| EmdmRow {
                    signal: &s.name,
                    theta: r.theta,
                    count: r.count,
                    limit_count: r.limit_count,
                    limit_value: r.limit_value,
                    eps: p.eps,
                    eps_count: p.count,
                    eps_value: p.value,
                    matches_limit_pattern: p.matches_limit_pattern,
                })
            })
        })
        .collect();
    emit_csv(&rows, args.output.csv.as_deref())?;
    emit_json(&report, args.output.out.as_deref(), stdout)?;
    Ok(if report.bound_holds == Some(false) { Outcome::AssertionFailed } else { Outcome::Ok })
}

fn qi_cmd(args: &QiArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    if args.trials == 0 || args.max_breaks == 0 {
        return Err(Error::Domain("--trials and --max-breaks must be positive".into()));
    }
    let th = theta(args.theta)?;
    let corpus = families::signal_pair_corpus(args.seed, args.trials, args.horizon, args.max_breaks, args.amplitude)?;
    let report = qi::qi_verify(&corpus, th, args.norm)?;
    emit_csv(&report.rows, args.output.csv.as_deref())?;
    emit_json(&report, args.output.out.as_deref(), stdout)?;
    let bad = report.violations.unwrap_or(0) > 0 || report.roundtrip_failures > 0;
    Ok(if bad { Outcome::AssertionFailed } else { Outcome::Ok })
}

#[derive(Serialize)]
struct CertifyRow<'a> {
    statistic: Statistic,
    family: &'a str,
    size: usize,
    value: f64,
    family_holds: bool,
}

fn certify_cmd(args: &CertifyArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let config = CertifyConfig {
        sizes: args.sizes.clone(),
        random_per_size: args.random_per_size,
        seed: args.seed,
    };
    let report = analysis::certify_norm(args.norm, &config)?;
    let rows: Vec<CertifyRow> = [&report.alternating, &report.same_sign, &report.sweep]
        .into_iter()
        .flat_map(|c| {
            c.families.iter().flat_map(move |f| {
                f.ladder.iter().map(move |p| CertifyRow {
                    statistic: c.statistic,
                    family: &f.family,
                    size: p.size,
                    value: p.value,
                    family_holds: f.holds,
                })
            })
        })
        .collect();
    emit_csv(&rows, args.output.csv.as_deref())?;
    emit_json(&report, args.output.out.as_deref(), stdout)?;
    // a NOT_EQUIVALENT verdict is a finding; an unreproducible witness is a bug
    Ok(if report.recheck_witnesses()? { Outcome::Ok } else { Outcome::AssertionFailed })
}

#[derive(Serialize)]
struct ProbeRow {
    side: &'static str,
    n: usize,
    theta: f64,
    count: usize,
    max_time_gap: f64,
}

fn probe_cmd(args: &ProbeArgs, stdout: &mut dyn Write) -> Result<Outcome> {
    let f = match &args.input {
        Some(p) => io::read_json::<Signal>(p)?,
        None => Signal::local_max(1.0)?,
    };
    let report = analysis::left_continuity_probe(&f, theta(args.theta0)?, args.steps)?;
    let rows: Vec<ProbeRow> = [("below", &report.from_below), ("above", &report.from_above)]
        .into_iter()
        .flat_map(|(side, steps)| {
            steps.iter().map(move |s| ProbeRow {
                side,
                n: s.n,
                theta: s.theta,
                count: s.count,
                max_time_gap: s.max_time_gap,
            })
        })
        .collect();
    emit_csv(&rows, args.output.csv.as_deref())?;
    emit_json(&report, args.output.out.as_deref(), stdout)?;
    let ok = report.times_monotone && report.approach_from_below;
    Ok(if ok { Outcome::Ok } else { Outcome::AssertionFailed })
}

fn generate(args: &GenerateArgs) -> Result<Outcome> {
    let (h, n, amp) = (args.horizon, args.n, args.amplitude);
    let signal = match args.kind {
        Generated::RampPlateau => Some(Signal::ramp_plateau(h)?),
        Generated::Sine => Some(Signal::sine_pwl(h, n)?),
        Generated::RandomWalk => Some(Signal::random_walk(h, args.seed, n, amp)?),
        Generated::Comb => Some(Signal::extrema_comb(h, n, amp)?),
        Generated::LocalMax => Some(Signal::local_max(amp)?),
        _ => None,
    };
    if let Some(f) = signal {
        io::write_json(&args.out, &f)?;
        return Ok(Outcome::Ok);
    }
    let eta = match args.kind {
        Generated::Alternating => families::alternating(n, true),
        Generated::Mmsn => families::mmsn(n),
        Generated::AllPositive => families::all_positive(n),
        Generated::RandomUnit => families::random_unit(args.seed, n),
        Generated::RandomPure => families::random_pure(args.seed, n, theta(amp)?.value(), h),
        _ => unreachable!("signal kinds handled above"),
    };
    io::write_events(&args.out, &eta)?;
    Ok(Outcome::Ok)
}

pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<Outcome> {
    match &cli.command {
        Command::Sample(a) => sample(a, stdout),
        Command::Norm(a) => norm(a, stdout),
        Command::Distance(a) => distance(a, stdout),
        Command::Decompose(a) => decompose(a, stdout),
        Command::Emdm(a) => emdm_cmd(a, stdout),
        Command::QiCheck(a) => qi_cmd(a, stdout),
        Command::Certify(a) => certify_cmd(a, stdout),
        Command::ProbeContinuity(a) => probe_cmd(a, stdout),
        Command::Generate(a) => generate(a),
    }
}

/// Parses `args`, runs, and maps the result to an exit code.
pub fn main_with_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli, stdout) {
        Ok(Outcome::Ok) => 0,
        Ok(Outcome::AssertionFailed) => {
            let _ = writeln!(stderr, "sodmetric: check failed; see the report");
            2
        }
        Err(e) => {
            let _ = writeln!(stderr, "sodmetric: {e}");
            1
        }
    }
}
