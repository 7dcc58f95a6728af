//! Batch front end: `kobdyn <command> --map FILE ...`.
//!
//! Every command writes one JSON report `{command, status, config, result,
//! error}` (orbits may be written as CSV instead). Exit codes: 0 success,
//! 1 bad input, 2 inconclusive or not converged (the partial report is
//! still written), 3 failed verification.

pub mod commands;
pub mod config;
pub mod spec;
pub mod verify;

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::Value;

use crate::error::Error;
use config::{Format, RunConfig};
use spec::{parse_point, MapSpec};
use verify::Suite;

#[derive(Debug, Parser)]
#[command(name = "kobdyn", version, about = "Iteration of holomorphic self-maps of the ball and the Siegel half-space")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

/// Flags overriding the configuration file.
#[derive(Debug, Args)]
struct Overrides {
    #[arg(long, global = true)]
    tol: Option<f64>,
    #[arg(long, global = true)]
    max_iter: Option<usize>,
    #[arg(long, global = true)]
    cap: Option<usize>,
    #[arg(long, global = true)]
    samples: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    eig_tol: Option<f64>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[arg(long, global = true)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct MapArgs {
    /// JSON map specification.
    #[arg(long)]
    map: PathBuf,
    /// Starting point as `[[re, im], ...]`.
    #[arg(long)]
    point: Option<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Denjoy-Wolff point, dilation and class.
    Classify(MapArgs),
    /// Divergence rate with its bracket.
    DivergenceRate(MapArgs),
    /// Hyperbolic m-step.
    Step {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 1)]
        gap: usize,
    },
    /// Canonical semi-model of a normal form.
    Model {
        #[arg(long)]
        map: PathBuf,
    },
    /// Solution of the Valiron equation.
    Valiron(MapArgs),
    /// Solution of the Abel equation.
    Abel(MapArgs),
    /// Checks on a one-parameter semigroup.
    Semigroup(MapArgs),
    /// Runs a property suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
    },
    /// Orbit samples for plotting.
    Orbit {
        #[command(flatten)]
        map: MapArgs,
        #[arg(long, default_value_t = 100)]
        steps: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Classify(_) => "classify",
            Command::DivergenceRate(_) => "divergence-rate",
            Command::Step { .. } => "step",
            Command::Model { .. } => "model",
            Command::Valiron(_) => "valiron",
            Command::Abel(_) => "abel",
            Command::Semigroup(_) => "semigroup",
            Command::Verify { .. } => "verify",
            Command::Orbit { .. } => "orbit",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Inconclusive,
    NotConverged,
    Failed,
    /// The orbit stopped early; the rows computed so far are reported.
    Truncated,
    Error,
}

/// Result of one command before it is written out.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub status: Status,
    pub result: Option<Value>,
    pub error: Option<String>,
    pub exit: i32,
}

impl Outcome {
    pub fn ok<T: Serialize>(result: T) -> Self {
        Outcome {
            status: Status::Ok,
            result: Some(serde_json::to_value(result).expect("reports serialize")),
            error: None,
            exit: 0,
        }
    }

    pub fn inconclusive(message: String, partial: Value) -> Self {
        Outcome { status: Status::Inconclusive, result: Some(partial), error: Some(message), exit: 2 }
    }

    /// An error with whatever was computed before it.
    pub fn partial(e: &Error, partial: Value) -> Self {
        let exit = exit_code(e);
        Outcome { status: status_of(e), result: Some(partial), error: Some(e.to_string()), exit }
    }

    pub fn from_error(e: Error) -> Self {
        let partial = match &e {
            Error::RateNotConverged(est) => serde_json::to_value(est).ok(),
            Error::StepNotConverged(est) => serde_json::to_value(est).ok(),
            _ => None,
        };
        Outcome { status: status_of(&e), exit: exit_code(&e), error: Some(e.to_string()), result: partial }
    }
}

/// 2 for numerical outcomes that more effort might change, 1 for inputs
/// the command cannot work with.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NotConverged { .. }
        | Error::RateNotConverged(_)
        | Error::StepNotConverged(_)
        | Error::Inconclusive(_)
        | Error::NotConvergent { .. }
        | Error::SamplingStarved { .. }
        | Error::MonotonicityViolation { .. }
        | Error::HypothesisFailed { .. }
        | Error::ConsistencyFailure(_)
        | Error::InjectivityCollision { .. } => 2,
        _ => 1,
    }
}

fn status_of(e: &Error) -> Status {
    match e {
        Error::Inconclusive(_) => Status::Inconclusive,
        _ if exit_code(e) == 2 => Status::NotConverged,
        _ => Status::Error,
    }
}

#[derive(Serialize)]
struct Report<'a> {
    command: &'a str,
    status: Status,
    config: &'a RunConfig,
    result: Option<Value>,
    error: Option<String>,
}

fn load_spec(path: &Path) -> crate::Result<MapSpec> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidInput(format!("cannot read {}: {e}", path.display())))?;
    MapSpec::parse(&text)
}

fn point_arg(text: &Option<String>) -> crate::Result<Option<crate::linalg::CVector>> {
    text.as_deref().map(parse_point).transpose()
}

fn resolve_config(o: &Overrides) -> crate::Result<RunConfig> {
    let mut cfg = RunConfig::from_env()?;
    if let Some(v) = o.tol {
        cfg.tol = v;
    }
    if let Some(v) = o.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = o.cap {
        cfg.cap = v;
    }
    if let Some(v) = o.samples {
        cfg.samples = v;
    }
    if let Some(v) = o.seed {
        cfg.seed = v;
    }
    if let Some(v) = o.eig_tol {
        cfg.eig_tol = v;
    }
    if let Some(v) = o.format {
        cfg.format = v;
    }
    if let Some(v) = &o.output {
        cfg.output = Some(v.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn emit(cfg: &RunConfig, text: &str) -> std::io::Result<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}

fn dispatch(command: &Command, cfg: &RunConfig) -> crate::Result<Outcome> {
    if cfg.format == Format::Csv && !matches!(command, Command::Orbit { .. }) {
        return Err(Error::InvalidInput("csv output is only available for orbit".into()));
    }
    match command {
        Command::Classify(a) => commands::classify(&load_spec(&a.map)?, point_arg(&a.point)?, cfg),
        Command::DivergenceRate(a) => commands::divergence(&load_spec(&a.map)?, point_arg(&a.point)?, cfg),
        Command::Step { map, gap } => commands::step(&load_spec(&map.map)?, point_arg(&map.point)?, *gap, cfg),
        Command::Model { map } => commands::model(&load_spec(map)?, cfg),
        Command::Valiron(a) => commands::valiron(&load_spec(&a.map)?, point_arg(&a.point)?, cfg),
        Command::Abel(a) => commands::abel(&load_spec(&a.map)?, point_arg(&a.point)?, cfg),
        Command::Semigroup(a) => commands::semigroup(&load_spec(&a.map)?, point_arg(&a.point)?, cfg),
        Command::Verify { suite } => {
            let report = verify::run(*suite, cfg);
            let mut out = Outcome::ok(&report);
            if !report.passed {
                out.status = Status::Failed;
                out.error = Some("some properties failed".into());
                out.exit = 3;
            }
            Ok(out)
        }
        Command::Orbit { map, steps } => {
            let spec = load_spec(&map.map)?;
            let data = commands::orbit(&spec, point_arg(&map.point)?, *steps)?;
            let result = if cfg.format == Format::Csv {
                Value::String(commands::orbit_csv(&data, spec.build()?.dim()))
            } else {
                serde_json::json!({ "rows": data.rows, "error": data.error })
            };
            let (status, exit) = if data.error.is_some() { (Status::Truncated, 2) } else { (Status::Ok, 0) };
            Ok(Outcome { status, result: Some(result), error: data.error, exit })
        }
    }
}

/// Parses `std::env::args` and runs the command; returns the exit code.
pub fn run() -> i32 {
    run_from(std::env::args_os())
}

pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let name = cli.command.name();
    let cfg = match resolve_config(&cli.overrides) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("kobdyn: {e}");
            return 1;
        }
    };
    let outcome = dispatch(&cli.command, &cfg).unwrap_or_else(Outcome::from_error);
    if let Some(msg) = &outcome.error {
        eprintln!("kobdyn {name}: {msg}");
    }
    let text = match (&outcome.result, cfg.format) {
        (Some(Value::String(csv)), Format::Csv) => csv.clone(),
        _ => {
            let report = Report {
                command: name,
                status: outcome.status,
                config: &cfg,
                result: outcome.result,
                error: outcome.error,
            };
            let mut s = serde_json::to_string_pretty(&report).expect("reports serialize");
            s.push('\n');
            s
        }
    };
    if let Err(e) = emit(&cfg, &text) {
        eprintln!("kobdyn: cannot write output: {e}");
        return 1;
    }
    outcome.exit
}
