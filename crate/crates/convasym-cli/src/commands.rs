//! Argument types and the command bodies behind the `convasym` binary.
//! Each command builds one OutputRecord; rendering and process exit live in
//! main. Exit codes: 0 success, 2 usage, 3 mathematical edge condition,
//! 4 verification failure.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use convasym_core::asymptotics::{multifold_asymptotic, solve_saddle};
use convasym_core::ensembles::{
    run_batch, summarize, BatchStats, MonteCarloSummary, SampleConfig, SampleEnsemble,
    BATCH_SAMPLES,
};
use convasym_core::genfun::{gf_logderiv, GeneratingFunction};
use convasym_core::ratefn::{rate_explicit, rate_from_gf, EnsembleTag, Srwb2Curve};
use convasym_core::sequences::{
    multifold_closed_catalan, multifold_closed_central, multifold_prefix, SequenceSpec,
};
use convasym_core::Error;
use rayon::prelude::*;

use crate::record::{fmt_real, Cell, OutputRecord};
use crate::verify::VerifyArgs;

/// Series truncation used when a command needs the one family without a
/// closed-form evaluator. Long enough to certify tails at every saddle the
/// bracketing probes visit for κ ≳ 0.01.
const CUBE_TRUNCATION: usize = 8000;

/// Points on the parametric 2SRWB curve backing interpolation.
const SRWB2_CURVE_POINTS: usize = 10_000;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Math(String),
    Verification(usize),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Math(_) => 3,
            CliError::Verification(_) => 4,
        }
    }

    pub fn message(&self) -> String {
        match self {
            CliError::Usage(m) | CliError::Math(m) => m.clone(),
            CliError::Verification(n) => format!("{n} check(s) failed"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Math(e.to_string())
    }
}

#[derive(Parser)]
#[command(
    name = "convasym",
    about = "Multifold convolutions of lattice-walk counting sequences: exact values, \
             saddle-point asymptotics, large-deviation rate curves, and zero-set sampling",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Tabulate M^(k)_n, exactly or asymptotically
    Conv(ConvArgs),
    /// Tabulate a large-deviation rate function on an x grid
    Rate(RateArgs),
    /// Solve the saddle-point equation kappa·t·(ln g)'(t) = 1
    Saddle(SaddleArgs),
    /// Monte Carlo statistics of the zero set of random bridges or Dyck paths
    Sample(SampleArgs),
    /// Run a self-check suite; exits 4 if any check fails
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
#[value(rename_all = "snake_case")]
pub enum Family {
    Catalan,
    Central,
    CentralSq,
    CentralCube,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Catalan => "catalan",
            Family::Central => "central",
            Family::CentralSq => "central_sq",
            Family::CentralCube => "central_cube",
        }
    }

    pub fn spec(self) -> SequenceSpec {
        match self {
            Family::Catalan => SequenceSpec::Catalan,
            Family::Central => SequenceSpec::Central,
            Family::CentralSq => SequenceSpec::CentralSq,
            Family::CentralCube => SequenceSpec::CentralCube,
        }
    }

    pub fn gf(self) -> Result<GeneratingFunction, CliError> {
        Ok(match self {
            Family::Catalan => GeneratingFunction::closed_catalan(),
            Family::Central => GeneratingFunction::closed_central(),
            Family::CentralSq => GeneratingFunction::closed_central_sq(),
            Family::CentralCube => {
                GeneratingFunction::series(&SequenceSpec::CentralCube, CUBE_TRUNCATION)?
            }
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ConvMode {
    Exact,
    Closed,
    Asympt,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Args)]
pub struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table to this path instead of stdout
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct ConvArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Number of convolution folds (k >= 1)
    #[arg(long)]
    pub k: u32,
    /// Largest coefficient index; rows cover 0..=n (asympt: 1..=n)
    #[arg(long)]
    pub n: usize,
    #[arg(long, value_enum)]
    pub mode: ConvMode,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn cmd_conv(args: &ConvArgs) -> Result<OutputRecord, CliError> {
    if args.k == 0 {
        return Err(CliError::Usage("--k must be at least 1".into()));
    }
    let mode_name = match args.mode {
        ConvMode::Exact => "exact",
        ConvMode::Closed => "closed",
        ConvMode::Asympt => "asympt",
    };
    let mut rec = OutputRecord::new("conv", vec!["n", "value", "mode"]);
    rec.param("family", args.family.name())
        .param("k", args.k)
        .param("n", args.n)
        .param("mode", mode_name);
    match args.mode {
        ConvMode::Exact => {
            let values = multifold_prefix(&args.family.spec(), args.k, args.n)?;
            for (j, v) in values.iter().enumerate() {
                rec.push_row(vec![Cell::int(j), Cell::int(v), Cell::Str(mode_name.into())]);
            }
        }
        ConvMode::Closed => {
            let closed: fn(u32, usize) -> convasym_core::Result<_> = match args.family {
                Family::Catalan => multifold_closed_catalan,
                Family::Central => multifold_closed_central,
                other => {
                    return Err(CliError::Usage(format!(
                        "--mode closed is only available for families catalan, central \
                         (got {})",
                        other.name()
                    )))
                }
            };
            for j in 0..=args.n {
                let v = closed(args.k, j)?;
                rec.push_row(vec![Cell::int(j), Cell::int(v), Cell::Str(mode_name.into())]);
            }
        }
        ConvMode::Asympt => {
            let gf = args.family.gf()?;
            for j in 1..=args.n {
                let ln_est = match multifold_asymptotic(&gf, args.k, j) {
                    Ok(v) => v,
                    Err(Error::SaddleAtRadius { kappa }) => {
                        return Err(saddle_at_radius_message(gf.radius(), kappa))
                    }
                    Err(e) => return Err(e.into()),
                };
                rec.push_row(vec![
                    Cell::int(j),
                    Cell::Real(ln_est),
                    Cell::Str(mode_name.into()),
                ]);
            }
        }
    }
    Ok(rec)
}

enum RateSource {
    Explicit(EnsembleTag),
    Curve2,
    FromGf(Family),
}

fn parse_rate_ensemble(s: &str) -> Result<RateSource, CliError> {
    match s {
        "srwb" => Ok(RateSource::Explicit(EnsembleTag::Srwb)),
        "dyck" => Ok(RateSource::Explicit(EnsembleTag::Dyck)),
        "srwb2" => Ok(RateSource::Curve2),
        other => {
            if let Some(fam) = other.strip_prefix("from-gf:") {
                if let Ok(f) = <Family as ValueEnum>::from_str(fam, false) {
                    return Ok(RateSource::FromGf(f));
                }
            }
            Err(CliError::Usage(format!(
                "unknown ensemble '{other}'; valid: srwb, dyck, srwb2, \
                 from-gf:<catalan|central|central_sq|central_cube>"
            )))
        }
    }
}

#[derive(Args)]
pub struct RateArgs {
    /// srwb, dyck, srwb2, or from-gf:<family>
    #[arg(long)]
    pub ensemble: String,
    /// Number of x grid points, both endpoints included
    #[arg(long, default_value_t = 201)]
    pub grid: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

pub fn cmd_rate(args: &RateArgs) -> Result<OutputRecord, CliError> {
    if args.grid < 2 || args.grid > 100_000 {
        return Err(CliError::Usage("--grid must be between 2 and 100000".into()));
    }
    let source = parse_rate_ensemble(&args.ensemble)?;
    let mut rec = OutputRecord::new("rate", vec!["x", "i_val"]);
    rec.param("ensemble", &args.ensemble).param("grid", args.grid);
    let step = 1.0 / (args.grid - 1) as f64;
    match source {
        RateSource::Explicit(tag) => {
            for i in 0..args.grid {
                let x = i as f64 * step;
                rec.push_row(vec![Cell::Real(x), Cell::Real(rate_explicit(tag, x)?)]);
            }
        }
        RateSource::Curve2 => {
            rec.param("curve_points", SRWB2_CURVE_POINTS);
            let curve = Srwb2Curve::build(SRWB2_CURVE_POINTS)?;
            for i in 0..args.grid {
                let x = i as f64 * step;
                rec.push_row(vec![Cell::Real(x), Cell::Real(curve.rate_at(x)?)]);
            }
        }
        RateSource::FromGf(family) => {
            let gf = family.gf()?;
            let spec = family.spec();
            for i in 0..args.grid {
                let x = i as f64 * step;
                // endpoints are t → ρ⁻ and t → 0⁺ limits of the tilt
                let i_val = if i == 0 {
                    0.0
                } else if i == args.grid - 1 {
                    gf.alpha() - spec.ln_term(1)?
                } else {
                    rate_from_gf(&gf, solve_t_for_x(&gf, x)?)?.i_val
                };
                rec.push_row(vec![Cell::Real(x), Cell::Real(i_val)]);
            }
        }
    }
    Ok(rec)
}

/// Inverts the decreasing map t ↦ x̃(t) on (0, ρ) by bisection.
fn solve_t_for_x(gf: &GeneratingFunction, target: f64) -> Result<f64, CliError> {
    let rho = gf.radius();
    let mut lo = rho * 1e-9;
    let mut hi = rho * (1.0 - 1e-9);
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return Ok(lo);
        }
        if rate_from_gf(gf, mid)?.x > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Args)]
pub struct SaddleArgs {
    #[arg(long, value_enum)]
    pub family: Family,
    /// Fold rate kappa = k/n directly
    #[arg(long, conflicts_with_all = ["k", "n"])]
    pub kappa: Option<f64>,
    /// Fold count (with --n)
    #[arg(long, requires = "n")]
    pub k: Option<u32>,
    /// Coefficient index (with --k)
    #[arg(long, requires = "k")]
    pub n: Option<usize>,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn saddle_at_radius_message(rho: f64, kappa: f64) -> CliError {
    CliError::Math(format!(
        "saddle at radius: at kappa = {kappa} the critical point runs against \
         t = {rho} from below; no interior saddle is representable"
    ))
}

pub fn cmd_saddle(args: &SaddleArgs) -> Result<OutputRecord, CliError> {
    let kappa = match (args.kappa, args.k, args.n) {
        (Some(kappa), None, None) => kappa,
        (None, Some(k), Some(n)) => {
            if k == 0 || n == 0 {
                return Err(CliError::Usage("--k and --n must be at least 1".into()));
            }
            k as f64 / n as f64
        }
        _ => {
            return Err(CliError::Usage(
                "provide either --kappa or the pair --k/--n".into(),
            ))
        }
    };
    if !(kappa > 0.0 && kappa.is_finite()) {
        return Err(CliError::Usage(format!("kappa must be positive (got {kappa})")));
    }
    let gf = args.family.gf()?;
    let mut rec = OutputRecord::new(
        "saddle",
        vec!["kappa", "t_star", "v", "exp_rate", "residual"],
    );
    rec.param("family", args.family.name()).param("kappa", fmt_real(kappa));
    let sp = match solve_saddle(&gf, kappa) {
        Ok(sp) => sp,
        Err(Error::SaddleAtRadius { kappa }) => {
            return Err(saddle_at_radius_message(gf.radius(), kappa))
        }
        Err(e) => return Err(e.into()),
    };
    let residual = (kappa * gf_logderiv(&gf, sp.t_star)? - 1.0).abs();
    rec.push_row(vec![
        Cell::Real(sp.kappa),
        Cell::Real(sp.t_star),
        Cell::Real(sp.v),
        Cell::Real(sp.exp_rate),
        Cell::Real(residual),
    ]);
    Ok(rec)
}

#[derive(Args)]
pub struct SampleArgs {
    /// dyck, or srwb_<m> for m >= 1 joint bridges
    #[arg(long)]
    pub ensemble: String,
    /// Half-length of the walks
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub samples: u64,
    /// RNG seed; runs with equal seeds are byte-identical
    #[arg(long)]
    pub seed: u64,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_sample_ensemble(s: &str) -> Result<SampleEnsemble, CliError> {
    if s == "dyck" {
        return Ok(SampleEnsemble::Dyck);
    }
    if let Some(m) = s.strip_prefix("srwb_") {
        if let Ok(m) = m.parse::<u32>() {
            if m >= 1 {
                return Ok(SampleEnsemble::Srwb(m));
            }
        }
    }
    Err(CliError::Usage(format!(
        "unknown ensemble '{s}'; valid: dyck, srwb_<m> with m >= 1 (e.g. srwb_1, srwb_2)"
    )))
}

/// CONVASYM_THREADS caps the rayon worker count (floor 1).
fn thread_pool() -> rayon::ThreadPool {
    let mut workers = std::thread::available_parallelism().map(|v| v.get()).unwrap_or(1);
    if let Ok(v) = std::env::var("CONVASYM_THREADS") {
        if let Ok(cap) = v.parse::<usize>() {
            if cap >= 1 {
                workers = workers.min(cap);
            }
        }
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool")
}

/// Batches fan out across workers; results merge in batch order, so the
/// summary is independent of scheduling and worker count.
pub fn run_sampling(cfg: &SampleConfig) -> Result<MonteCarloSummary, Error> {
    cfg.validate()?;
    let stats: Vec<BatchStats> = thread_pool().install(|| {
        (0..cfg.num_batches())
            .into_par_iter()
            .map(|b| run_batch(cfg, b))
            .collect::<Result<_, _>>()
    })?;
    let acc = stats
        .into_iter()
        .reduce(|mut a, b| {
            a.merge(&b);
            a
        })
        .expect("at least one batch");
    summarize(cfg, acc)
}

pub fn cmd_sample(args: &SampleArgs) -> Result<OutputRecord, CliError> {
    let ensemble = parse_sample_ensemble(&args.ensemble)?;
    let cfg = SampleConfig {
        ensemble,
        n: args.n,
        num_samples: args.samples,
        seed: args.seed,
    };
    cfg.validate()
        .map_err(|e| CliError::Usage(format!("invalid sampling config: {e}")))?;
    let summary = run_sampling(&cfg)?;
    let mut rec = OutputRecord::new("sample", vec!["section", "key", "value", "std_error"]);
    rec.param("ensemble", &args.ensemble)
        .param("n", args.n)
        .param("samples", args.samples)
        .param("seed", args.seed)
        .param("rng", summary.rng_algorithm)
        .param("batch_samples", BATCH_SAMPLES)
        .param("scale", fmt_real(summary.scale));
    for (size, count) in &summary.histogram.counts {
        rec.push_row(vec![
            Cell::Str("count".into()),
            Cell::int(size),
            Cell::int(count),
            Cell::Null,
        ]);
    }
    for size in summary.histogram.counts.keys() {
        rec.push_row(vec![
            Cell::Str("pmf".into()),
            Cell::int(size),
            Cell::Real(summary.histogram.prob(*size)),
            Cell::Real(summary.histogram.prob_se(*size)),
        ]);
    }
    for m in &summary.moments {
        rec.push_row(vec![
            Cell::Str("moment".into()),
            Cell::int(m.order),
            Cell::Real(m.value),
            Cell::Real(m.std_error),
        ]);
    }
    Ok(rec)
}
