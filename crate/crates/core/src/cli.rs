//! The `commonfix` command-line harness.
//!
//! Exit codes: 0 success or condition satisfied, 1 condition violated or
//! result not certified (a report is still written), 2 usage or config error.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotic::{asymptotic_radius_center, regularity_probe};
use crate::conditions::{
    check_c, check_clambda, check_e, check_nonexpansive, minimal_mu, monotonicity_probe, PairSample,
};
use crate::config::{self, ConditionName, ConfigError, Overrides, ProblemConfig};
use crate::error::Error;
use crate::iteration::{
    goebel_kirk_check, krasnoselskii_multi, krasnoselskii_single, IterationTrace,
};
use crate::maps::{AnyMap, SelfMap};
use crate::reproduce::run_suite;
use crate::solver::{check_commuting, solve_common, CommonFixedPointProblem, TRACE_GAP_TOL};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "commonfix",
    version,
    about = "Check generalized nonexpansive conditions and compute common fixed points"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Problem definition (JSON).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Directory for CSV traces.
    #[arg(long = "trace-dir", global = true, value_name = "DIR")]
    pub trace_dir: Option<PathBuf>,

    /// Overrides every seed in the config.
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,

    /// Worker threads (default: available parallelism).
    #[arg(long, global = true, value_name = "N")]
    pub threads: Option<usize>,

    /// Overrides the iteration tolerance or solver epsilon.
    #[arg(long, global = true, value_name = "REAL")]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Sampled check of one condition on `map`.
    CheckConditions,
    /// Averaged iteration of `map` from `start`.
    Iterate,
    /// Asymptotic radius and center of `sequence` relative to `domain`.
    AsymptoticCenter,
    /// Sampled commuting check of `t` and `T`.
    CheckCommuting,
    /// Common fixed point of `t` and `T`.
    SolveCommon,
    /// Run the built-in example suite and print a pass/fail table.
    ReproducePaper,
}

#[derive(Debug)]
enum CliError {
    Config(ConfigError),
    Run(Error),
    Io(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e)
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Run(e)
    }
}

/// A finished command: the JSON report and whether it counts as success.
struct Report {
    body: Value,
    ok: bool,
}

impl Report {
    fn new(body: impl Serialize, ok: bool) -> Result<Self, CliError> {
        let body = serde_json::to_value(body).map_err(|e| CliError::Io(e.to_string()))?;
        Ok(Self { body, ok })
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let _ = e.print();
            e.exit_code()
        }
    }
}

pub fn run(cli: &Cli) -> i32 {
    match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(cli)),
            Err(e) => {
                eprintln!("error: cannot start {n} threads: {e}");
                EXIT_USAGE
            }
        },
        None => dispatch(cli),
    }
}

fn dispatch(cli: &Cli) -> i32 {
    let overrides = Overrides {
        seed: cli.seed,
        tol: cli.tol,
    };
    let result = if cli.command == Command::ReproducePaper {
        reproduce(cli, &overrides)
    } else {
        load(cli).and_then(|cfg| match cli.command {
            Command::CheckConditions => check_conditions(&cfg, &overrides),
            Command::Iterate => iterate(&cfg, &overrides, cli.trace_dir.as_deref()),
            Command::AsymptoticCenter => asymptotic(&cfg, &overrides),
            Command::CheckCommuting => commuting(&cfg, &overrides),
            Command::SolveCommon => solve(&cfg, &overrides, cli.trace_dir.as_deref()),
            Command::ReproducePaper => unreachable!("handled above"),
        })
    };
    match result {
        Ok(report) => match emit(&report.body, cli.out.as_deref()) {
            Ok(()) if report.ok => EXIT_OK,
            Ok(()) => EXIT_FAILED,
            Err(e) => fail(&e),
        },
        Err(CliError::Run(e)) if aborts(&e) => {
            let body = abort_report(&e);
            match emit(&body, cli.out.as_deref()) {
                Ok(()) => EXIT_FAILED,
                Err(e) => fail(&e),
            }
        }
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> i32 {
    match e {
        CliError::Config(c) => eprintln!("error: {c}"),
        CliError::Run(r) => eprintln!("error: {r}"),
        CliError::Io(m) => eprintln!("error: {m}"),
    }
    EXIT_USAGE
}

/// Hypothesis failures of the solver: reported, not usage errors.
fn aborts(e: &Error) -> bool {
    matches!(
        e,
        Error::NotCommuting { .. } | Error::EmptyIntersection { .. } | Error::NoFixedPoints(_)
    )
}

fn abort_report(e: &Error) -> Value {
    let (stage, witness) = match e {
        Error::NotCommuting { x, y, distance } => {
            ("commuting", json!({"x": x, "y": y, "distance": distance}))
        }
        Error::EmptyIntersection { x, distance } => {
            ("intersection", json!({"x": x, "distance": distance}))
        }
        _ => ("fixed_points", Value::Null),
    };
    json!({
        "status": "aborted",
        "stage": stage,
        "error": e.to_string(),
        "witness": witness,
    })
}

fn load(cli: &Cli) -> Result<ProblemConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Config(ConfigError::new(".", "--config PATH is required")))?;
    Ok(config::load(path)?)
}

fn emit(body: &Value, out: Option<&Path>) -> Result<(), CliError> {
    if body.is_null() {
        return Ok(());
    }
    let mut text = serde_json::to_string_pretty(body).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text).map_err(|e| CliError::Io(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn write_trace(dir: Option<&Path>, name: &str, trace: &IterationTrace) -> Result<(), CliError> {
    let Some(dir) = dir else {
        return Ok(());
    };
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let path = dir.join(name);
    let file =
        fs::File::create(&path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    trace
        .write_csv(file)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn check_conditions(cfg: &ProblemConfig, o: &Overrides) -> Result<Report, CliError> {
    let map = cfg.any_map()?;
    let condition = cfg.condition()?;
    let sample = PairSample::for_map(&map, &cfg.sample_config(o));
    match condition {
        ConditionName::C => {
            let r = check_c(&map, &sample);
            let ok = r.satisfied;
            Report::new(r, ok)
        }
        ConditionName::CLambda => {
            let lambda = cfg.require_lambda()?;
            let r = check_clambda(&map, lambda, &sample).map_err(in_params)?;
            let ok = r.satisfied;
            Report::new(r, ok)
        }
        ConditionName::EMu => {
            let mu = cfg.require_mu()?;
            let r = check_e(&map, mu, &sample).map_err(in_params)?;
            let ok = r.satisfied;
            Report::new(r, ok)
        }
        ConditionName::E => {
            let est = minimal_mu(&map, &sample);
            let r = check_e(&map, est.mu, &sample)?;
            let ok = r.satisfied;
            Report::new(json!({"mu_estimate": est, "report": r}), ok)
        }
        ConditionName::Nonexpansive => {
            let r = check_nonexpansive(&map, &sample);
            let ok = r.satisfied;
            Report::new(r, ok)
        }
        ConditionName::MinimalMu => Report::new(minimal_mu(&map, &sample), true),
        ConditionName::Monotonicity => {
            let (l1, l2) = (cfg.require_lambda()?, cfg.require_lambda2()?);
            let holds = monotonicity_probe(&map, l1, l2, &sample).map_err(in_params)?;
            Report::new(
                json!({"lambda1": l1, "lambda2": l2, "sample": sample.description(), "holds": holds}),
                holds,
            )
        }
    }
}

fn in_params(e: Error) -> CliError {
    CliError::Config(ConfigError::new("params", e))
}

fn iterate(
    cfg: &ProblemConfig,
    o: &Overrides,
    trace_dir: Option<&Path>,
) -> Result<Report, CliError> {
    let map = cfg.any_map()?;
    let start = cfg.start()?;
    let opts = cfg.iteration_options(o);
    let trace = match &map {
        AnyMap::Single(t) => krasnoselskii_single(t, start, &opts),
        AnyMap::Multi(t) => krasnoselskii_multi(t, start, &opts),
    }
    .map_err(|e| match e {
        Error::OutOfDomain { .. } | Error::DimensionMismatch { .. } => {
            CliError::Config(ConfigError::new("start", e))
        }
        other => in_params(other),
    })?;
    write_trace(trace_dir, "trace.csv", &trace)?;
    let goebel_kirk = (trace.converged() && trace.len() >= 3)
        .then(|| {
            goebel_kirk_check(
                map.space(),
                &trace.points,
                &trace.selections,
                trace.step,
                TRACE_GAP_TOL,
            )
        })
        .transpose()?;
    let ok = trace.converged();
    Report::new(
        json!({
            "valuedness": map.valuedness(),
            "step": trace.step,
            "rule": trace.rule,
            "start": trace.start,
            "tol": trace.tol,
            "budget": trace.budget,
            "termination": trace.termination,
            "iterations": trace.len() - 1,
            "final_point": trace.last_point(),
            "final_residual": trace.final_residual(),
            "recurrence_verified": trace.verify_recurrence(),
            "goebel_kirk": goebel_kirk,
            "warnings": trace.warnings,
        }),
        ok,
    )
}

fn asymptotic(cfg: &ProblemConfig, o: &Overrides) -> Result<Report, CliError> {
    let space = cfg.space()?;
    let seq = cfg.sequence()?;
    let domain = cfg.explicit_domain()?;
    let res = asymptotic_radius_center(&space, seq, domain, &cfg.asymptotic_options())
        .map_err(in_params)?;
    let regularity = cfg
        .regularity_options(o)
        .map(|r| regularity_probe(&space, seq, domain, &r))
        .transpose()
        .map_err(in_params)?;
    Report::new(json!({"asymptotic": res, "regularity": regularity}), true)
}

fn commuting(cfg: &ProblemConfig, o: &Overrides) -> Result<Report, CliError> {
    let t = cfg.single_t()?;
    let big_t = cfg.multi_t()?;
    let r = check_commuting(&t, &big_t, cfg.commuting_samples(), cfg.seed(o))
        .map_err(|e| CliError::Config(ConfigError::new("T", e)))?;
    let ok = r.commuting;
    Report::new(r, ok)
}

fn solve(cfg: &ProblemConfig, o: &Overrides, trace_dir: Option<&Path>) -> Result<Report, CliError> {
    let t = cfg.single_t()?;
    let big_t = cfg.multi_t()?;
    let lambda = cfg.params.lambda.unwrap_or(0.5);
    let problem =
        CommonFixedPointProblem::new(t, big_t, lambda, cfg.solver_options(o)).map_err(in_params)?;
    let r = solve_common(&problem)?;
    write_trace(trace_dir, "outer.csv", &r.outer.trace)?;
    write_trace(trace_dir, "inner.csv", &r.inner.trace)?;
    let ok = r.certified;
    Report::new(r, ok)
}

fn reproduce(cli: &Cli, o: &Overrides) -> Result<Report, CliError> {
    let suite = run_suite(o.seed.unwrap_or(0));
    print!("{}", suite.table());
    let ok = suite.all_passed();
    match &cli.out {
        Some(_) => Report::new(suite, ok),
        None => Ok(Report {
            body: Value::Null,
            ok,
        }),
    }
}
