//! `pfl`: simulate planar random flights, evaluate their laws and estimate
//! the turn rate from sampled positions.
//!
//! Exit codes: 0 success, 1 runtime/numerical failure, 2 usage, input or
//! configuration error. Errors are written to stderr as one JSON object.

mod input;
mod table;

use std::fs::File;
use std::io::{self, BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use pfl::analytics::{
    fisher_info, moment_closed_form_paper, moment_quadrature, radial_density_offset, radial_density_origin,
};
use pfl::estimators::{lambda_dot, lambda_hat, lambda_tilde, summarize_increments, DEFAULT_EPSILON};
use pfl::flight::simulate_trajectory;
use pfl::montecarlo::{run_experiment, EstimatorChoice, RunOptions};
use pfl::report::{summary_csv, RAW_DIGITS, SUMMARY_DIGITS};
use pfl::{ExperimentConfig, FlightParams, Point, SeedSpec};
use serde_json::json;
use thiserror::Error;

use input::{read_sample, InputFormat};
use table::{Format, Table};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Library(#[from] pfl::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Input(_) => 2,
            CliError::Library(pfl::Error::InvalidParameter(_)) => 2,
            CliError::Library(_) | CliError::Io(_) => 1,
        }
    }

    fn report(&self) -> serde_json::Value {
        let kind = match self {
            CliError::Usage(_) => "usage",
            CliError::Input(_) => "input",
            CliError::Io(_) => "io",
            CliError::Library(e) => match e {
                pfl::Error::InvalidParameter(_) => "invalid_parameter",
                pfl::Error::Domain(_) => "domain",
                pfl::Error::Numerical { .. } => "numerical",
                pfl::Error::BesselOverflow { .. } => "bessel_overflow",
                pfl::Error::InconsistentInput(_) => "inconsistent_input",
                pfl::Error::EmptyCell { .. } => "empty_cell",
            },
        };
        let mut obj = json!({ "error": kind, "message": self.to_string() });
        if let CliError::Library(pfl::Error::Numerical { estimate, .. }) = self {
            obj["estimate"] = json!(estimate.is_finite().then_some(*estimate));
        }
        obj
    }
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser)]
#[command(name = "pfl", version, about = "Planar random flights: simulation, laws and turn-rate estimation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one path and print its positions on the grid t_i = iT/n.
    #[command(allow_negative_numbers = true)]
    Simulate(SimulateArgs),
    /// Estimate the turn rate from sampled positions.
    #[command(allow_negative_numbers = true)]
    Estimate(EstimateArgs),
    /// Radial density of the distance from (0, 0).
    #[command(allow_negative_numbers = true)]
    Density(DensityArgs),
    /// Moments E R^p(t) of a flight started at (0, 0).
    #[command(allow_negative_numbers = true)]
    Moments(MomentsArgs),
    /// Fisher information of n equidistant increments.
    #[command(allow_negative_numbers = true)]
    Fisher(FisherArgs),
    /// Run a Monte Carlo study described by a JSON config.
    #[command(allow_negative_numbers = true)]
    Mc(McArgs),
}

#[derive(Args)]
struct OutputArgs {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct FlightArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    c: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    #[arg(long, default_value_t = 0.0)]
    y0: f64,
}

impl FlightArgs {
    fn params(&self) -> CliResult<FlightParams> {
        Ok(FlightParams::new(self.lambda, self.c)?.with_origin(Point::new(self.x0, self.y0))?)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    flight: FlightArgs,
    /// Horizon T.
    #[arg(long = "T", visible_alias = "horizon")]
    horizon: f64,
    /// Number of observation intervals.
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0)]
    stream: u64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum EstimatorArg {
    Hat,
    Tilde,
    Dot,
    All,
}

#[derive(Args)]
struct EstimateArgs {
    #[arg(long)]
    c: f64,
    #[arg(long, value_enum, default_value_t = EstimatorArg::All)]
    estimator: EstimatorArg,
    /// Relative turn-classification tolerance.
    #[arg(long, default_value_t = DEFAULT_EPSILON)]
    epsilon: f64,
    /// Positions file (`i,t,x,y`); `-` reads stdin.
    #[arg(long = "in", default_value = "-")]
    input: String,
    #[arg(long, value_enum, default_value_t = InputFormat::Auto)]
    input_format: InputFormat,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct DensityArgs {
    #[command(flatten)]
    flight: FlightArgs,
    #[arg(long)]
    t: f64,
    /// Radii to evaluate; defaults to an even grid inside the support.
    #[arg(long, value_delimiter = ',')]
    r: Vec<f64>,
    /// Size of the default grid.
    #[arg(long, default_value_t = 20)]
    points: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct MomentsArgs {
    #[arg(long)]
    lambda: f64,
    #[arg(long)]
    c: f64,
    #[arg(long)]
    t: f64,
    #[arg(long, value_delimiter = ',', default_values_t = [1.0, 2.0, 3.0])]
    p: Vec<f64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FisherArgs {
    #[arg(long, value_delimiter = ',', required = true)]
    lambda: Vec<f64>,
    #[arg(long, value_delimiter = ',', required = true)]
    delta: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct McArgs {
    /// JSON experiment config.
    #[arg(long)]
    config: PathBuf,
    /// Worker threads; 0 lets the runtime decide.
    #[arg(long, env = "PFL_THREADS", default_value_t = 0)]
    threads: usize,
    /// Also write one NDJSON record per replication to this file.
    #[arg(long)]
    raw: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn open_output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn emit(table: &Table, output: &OutputArgs) -> CliResult<()> {
    let out = open_output(&output.out)?;
    table.write(out, output.format, RAW_DIGITS)?;
    Ok(())
}

fn simulate(args: &SimulateArgs) -> CliResult<()> {
    let params = args.flight.params()?;
    if !(args.horizon > 0.0 && args.horizon.is_finite()) {
        return Err(CliError::Usage(format!("--T must be positive, got {}", args.horizon)));
    }
    if args.n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let traj = simulate_trajectory(&params, args.horizon, SeedSpec::new(args.seed, args.stream))?;
    let sample = traj.sample_at_grid(args.n)?;
    let mut table = Table::new(&["i", "t", "x", "y"]);
    for (i, p) in sample.positions().iter().enumerate() {
        let t = if i == args.n {
            args.horizon
        } else {
            args.horizon * i as f64 / args.n as f64
        };
        table.push(vec![i.into(), t.into(), p.x.into(), p.y.into()]);
    }
    emit(&table, &args.output)
}

fn estimate(args: &EstimateArgs) -> CliResult<()> {
    if !(args.c > 0.0 && args.c.is_finite()) {
        return Err(CliError::Usage(format!("--c must be positive, got {}", args.c)));
    }
    pfl::estimators::validate_epsilon(args.epsilon)?;
    let sample = if args.input == "-" {
        read_sample(io::stdin().lock(), args.input_format, args.c)?
    } else {
        let file = File::open(&args.input).map_err(|e| CliError::Input(format!("{}: {e}", args.input)))?;
        read_sample(file, args.input_format, args.c)?
    };
    let summary = summarize_increments(&sample, args.epsilon)?;
    let kinds: &[EstimatorChoice] = match args.estimator {
        EstimatorArg::Hat => &[EstimatorChoice::Hat],
        EstimatorArg::Tilde => &[EstimatorChoice::Tilde],
        EstimatorArg::Dot => &[EstimatorChoice::Dot],
        EstimatorArg::All => &EstimatorChoice::ALL,
    };
    let mut table = Table::new(&["kind", "value", "stderr", "n", "delta", "n_plus", "saturated"]);
    for kind in kinds {
        let e = match kind {
            EstimatorChoice::Hat => lambda_hat(&summary)?,
            EstimatorChoice::Tilde => lambda_tilde(&summary)?,
            EstimatorChoice::Dot => lambda_dot(&summary),
        };
        table.push(vec![
            kind.as_str().into(),
            e.value.into(),
            e.stderr.into(),
            e.n.into(),
            e.delta.into(),
            e.n_plus.into(),
            e.saturated.into(),
        ]);
    }
    emit(&table, &args.output)
}

fn density(args: &DensityArgs) -> CliResult<()> {
    let params = args.flight.params()?;
    if !(args.t > 0.0 && args.t.is_finite()) {
        return Err(CliError::Usage(format!("--t must be positive, got {}", args.t)));
    }
    if let Some(r) = args.r.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
        return Err(CliError::Usage(format!("radii must be finite and non-negative, got {r}")));
    }
    let reach = params.c() * args.t;
    let rho0 = params.origin().norm();
    let radii = if args.r.is_empty() {
        if args.points == 0 {
            return Err(CliError::Usage("--points must be at least 1".into()));
        }
        let (lo, hi) = ((rho0 - reach).max(0.0), rho0 + reach);
        (1..=args.points)
            .map(|k| lo + (hi - lo) * k as f64 / (args.points + 1) as f64)
            .collect()
    } else {
        args.r.clone()
    };
    let mut table = Table::new(&["r", "ac", "singular_weight"]);
    for r in radii {
        let value = if rho0 == 0.0 {
            radial_density_origin(&params, args.t, r)
        } else {
            radial_density_offset(&params, args.t, r)
        };
        let ac = match value {
            Ok(d) => d.ac,
            // outside the support of the absolutely continuous part
            Err(pfl::Error::Domain(_)) => 0.0,
            Err(e) => return Err(e.into()),
        };
        table.push(vec![r.into(), ac.into(), (-params.lambda() * args.t).exp().into()]);
    }
    emit(&table, &args.output)
}

fn moments(args: &MomentsArgs) -> CliResult<()> {
    let params = FlightParams::new(args.lambda, args.c)?;
    if !(args.t > 0.0 && args.t.is_finite()) {
        return Err(CliError::Usage(format!("--t must be positive, got {}", args.t)));
    }
    if let Some(p) = args.p.iter().find(|p| !(**p >= 0.0 && p.is_finite())) {
        return Err(CliError::Usage(format!("moment orders must be finite and non-negative, got {p}")));
    }
    let mut table = Table::new(&["p", "value_paper", "value_quadrature"]);
    for &p in &args.p {
        // the closed form only exists for integer p >= 1
        let paper = if p >= 1.0 && p.fract() == 0.0 && p <= u32::MAX as f64 {
            moment_closed_form_paper(&params, args.t, p as u32)?
        } else {
            f64::NAN
        };
        let quad = moment_quadrature(&params, args.t, p)?;
        table.push(vec![p.into(), paper.into(), quad.into()]);
    }
    emit(&table, &args.output)
}

fn fisher(args: &FisherArgs) -> CliResult<()> {
    let infos = args
        .lambda
        .iter()
        .flat_map(|&l| args.delta.iter().map(move |&d| fisher_info(l, d, args.n)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut table = Table::new(&["lambda", "delta", "n", "per_obs", "idealized", "total"]);
    let pairs = args.lambda.iter().flat_map(|&l| args.delta.iter().map(move |&d| (l, d)));
    for ((lambda, delta), info) in pairs.zip(infos) {
        table.push(vec![
            lambda.into(),
            delta.into(),
            info.n.into(),
            info.per_observation.into(),
            info.idealized_per_observation.into(),
            info.total.into(),
        ]);
    }
    emit(&table, &args.output)
}

fn mc(args: &McArgs) -> CliResult<()> {
    let mut text = String::new();
    File::open(&args.config)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    let config: ExperimentConfig =
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    config
        .validate()
        .map_err(|e| CliError::Usage(format!("{}: {e}", args.config.display())))?;
    let run = run_experiment(
        &config,
        &RunOptions {
            threads: args.threads,
            keep_records: args.raw.is_some(),
        },
    )?;
    if let Some(path) = &args.raw {
        let mut raw = BufWriter::new(File::create(path)?);
        for record in &run.records {
            serde_json::to_writer(&mut raw, record).map_err(io::Error::from)?;
            raw.write_all(b"\n")?;
        }
        raw.flush()?;
    }
    let failed: usize = run.summaries.iter().map(|s| s.failed_count).sum();
    if failed > 0 {
        eprintln!("{}", json!({ "warning": "failed_replications", "count": failed }));
    }
    let mut out = open_output(&args.out)?;
    out.write_all(summary_csv(&run.summaries, SUMMARY_DIGITS).as_bytes())?;
    out.flush()?;
    Ok(())
}

fn run(cli: &Cli) -> CliResult<()> {
    match &cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Estimate(a) => estimate(a),
        Command::Density(a) => density(a),
        Command::Moments(a) => moments(a),
        Command::Fisher(a) => fisher(a),
        Command::Mc(a) => mc(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Io(e)) if e.kind() == io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", e.report());
            ExitCode::from(e.exit_code())
        }
    }
}
