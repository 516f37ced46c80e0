mod activate;
mod check;
mod report;
mod spec;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use gmelab::Tolerances;
use serde_json::{json, Value};

use crate::check::Criterion;
use crate::report::{to_value, write_json, CliError, Report};
use crate::spec::StateSpec;
use crate::sweep::SweepCriterion;

/// Entanglement certification for small multipartite states.
///
/// Any tolerance can be overridden with `--tol-<field> <value>`, e.g.
/// `--tol-sdp-gap 1e-8`; field names follow the `tolerances` block of a report.
#[derive(Debug, Parser)]
#[command(name = "gmelab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Seed for every stochastic component.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Write the report (or the sweep CSV) here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Write witness, mixture or certificate matrices to this JSON file.
    #[arg(long, global = true)]
    emit_matrices: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one criterion on a state, per cut or on the whole state.
    Check {
        /// `isotropic:0.5`, `ghz:3`, `star_pen:3:0.4`, `pen:3:1-2=0.5,2-3=0.4`,
        /// `bell`, `maximally_mixed:3`, optionally `^k` for copies; inline JSON or `@file.json`.
        #[arg(long)]
        state: String,
        /// ppt, negativity, gb, tppt, gilbert, gme-witness, sum or activatable.
        #[arg(long)]
        criterion: String,
        /// A cut such as `1|23`; all cuts when omitted.
        #[arg(long)]
        cut: Option<String>,
    },
    /// Threshold, p̂ search and verified biseparable certificate for a star network.
    Activate {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        k: usize,
        /// Use this visibility instead of searching for p̂.
        #[arg(long)]
        p: Option<f64>,
    },
    /// Evaluate criteria over a grid of star networks and write CSV.
    Sweep {
        /// Party counts, comma separated.
        #[arg(long)]
        n: String,
        /// Copy counts, comma separated.
        #[arg(long, default_value = "1")]
        k: String,
        /// `start:stop:step` or a comma list.
        #[arg(long)]
        p_grid: String,
        /// Comma list; `ppt-per-edge` or any `check` criterion.
        #[arg(long, default_value = "ppt-per-edge")]
        criterion: String,
    },
}

/// Pull `--tol-<field> <value>` pairs out of the argument list.
fn split_tolerances(args: Vec<String>) -> Result<(Vec<String>, Tolerances), CliError> {
    let mut rest = Vec::new();
    let mut tol = to_value(&Tolerances::DEFAULT);
    let mut it = args.into_iter();
    while let Some(a) = it.next() {
        let Some(spec) = a.strip_prefix("--tol-") else {
            rest.push(a);
            continue;
        };
        let (name, value) = match spec.split_once('=') {
            Some((n, v)) => (n.to_string(), v.to_string()),
            None => {
                let v = it
                    .next()
                    .ok_or_else(|| CliError::Input(format!("--tol-{spec} needs a value")))?;
                (spec.to_string(), v)
            }
        };
        let key = name.replace('-', "_");
        let slot = tol
            .get_mut(&key)
            .ok_or_else(|| CliError::Input(format!("unknown tolerance --tol-{name}")))?;
        let parsed: Value = serde_json::from_str(&value)
            .ok()
            .filter(Value::is_number)
            .ok_or_else(|| CliError::Input(format!("--tol-{name}: {value:?} is not a number")))?;
        *slot = parsed;
    }
    let tol = serde_json::from_value(tol)
        .map_err(|e| CliError::Input(format!("tolerance override: {e}")))?;
    Ok((rest, tol))
}

fn threads() -> Result<usize, CliError> {
    match std::env::var("GMELAB_THREADS") {
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Input(format!(
                "GMELAB_THREADS={v:?} is not a positive integer"
            ))),
        },
        Err(_) => Ok(std::thread::available_parallelism()
            .map(|n| n.get())
            .unwrap_or(1)),
    }
}

fn write_sidecar(path: Option<&PathBuf>, value: Value) -> Result<(), CliError> {
    if let Some(p) = path {
        write_json(&value, Some(p))?;
    }
    Ok(())
}

/// Runs the command; the value is the report payload, the string the status.
fn execute(cli: &Cli, tol: &Tolerances) -> Result<(Value, &'static str), CliError> {
    match &cli.command {
        Command::Check {
            state,
            criterion,
            cut,
        } => {
            let criterion: Criterion = criterion.parse()?;
            let spec = StateSpec::parse(state)?;
            let rho = spec.build(tol)?;
            let entries = check::run_check(&rho, criterion, cut.as_deref(), cli.seed, tol)?;
            let sidecars: Vec<Value> = entries.iter().filter_map(|e| e.sidecar.clone()).collect();
            if cli.emit_matrices.is_some() {
                let dense = spec::StateSpec::Dense(spec::DenseState::from_density(&rho));
                write_sidecar(
                    cli.emit_matrices.as_ref(),
                    json!({ "state": dense, "matrices": sidecars }),
                )?;
            }
            let payload = json!({
                "state": spec,
                "dimension": rho.dim(),
                "criterion": criterion.name(),
                "results": entries,
            });
            Ok((payload, "ok"))
        }
        Command::Activate { n, k, p } => {
            let a = activate::run_activate(*n, *k, *p, cli.seed, tol)?;
            write_sidecar(cli.emit_matrices.as_ref(), a.certificate)?;
            if !a.passed {
                return Err(CliError::solver(
                    "verification: certificate failed its checks",
                    Some(a.summary),
                ));
            }
            Ok((a.summary, "ok"))
        }
        Command::Sweep { .. } => unreachable!("sweep writes its own output"),
    }
}

fn execute_sweep(cli: &Cli, tol: &Tolerances) -> Result<(Value, &'static str), CliError> {
    let Command::Sweep {
        n,
        k,
        p_grid,
        criterion,
    } = &cli.command
    else {
        unreachable!()
    };
    let ns = sweep::parse_list(n, "party count")?;
    let ks = sweep::parse_list(k, "copy count")?;
    let grid = sweep::parse_grid(p_grid)?;
    let criteria = criterion
        .split(',')
        .map(|c| SweepCriterion::parse(c.trim()))
        .collect::<Result<Vec<_>, _>>()?;
    let (rows, failures) = sweep::run_sweep(&ns, &ks, &grid, &criteria, cli.seed, tol, threads()?)?;
    match &cli.out {
        Some(path) => sweep::write_csv(&rows, std::fs::File::create(path)?)?,
        None => sweep::write_csv(&rows, std::io::stdout().lock())?,
    }
    let status = if failures.is_empty() { "ok" } else { "partial" };
    Ok((
        json!({ "rows": rows.len(), "points": ns.len() * ks.len() * grid.len(), "failures": failures }),
        status,
    ))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let argv: Vec<String> = std::env::args().collect();
    let (args, tol) = match split_tolerances(argv.clone()) {
        Ok(x) => x,
        Err(e) => {
            eprintln!("error: {}", e.message());
            return ExitCode::from(e.exit_code());
        }
    };
    let cli = Cli::parse_from(args);
    let is_sweep = matches!(cli.command, Command::Sweep { .. });
    let outcome = if is_sweep {
        execute_sweep(&cli, &tol)
    } else {
        execute(&cli, &tol)
    };
    let (status, error, result, code) = match outcome {
        Ok((v, s)) => (s.to_string(), None, v, 0),
        Err(e) => {
            let partial = match &e {
                CliError::Solver { partial, .. } => partial.clone().unwrap_or(Value::Null),
                CliError::Input(_) => Value::Null,
            };
            (
                e.status().to_string(),
                Some(e.message().to_string()),
                partial,
                e.exit_code(),
            )
        }
    };
    let report = Report {
        command: argv.into_iter().skip(1).collect(),
        version: env!("CARGO_PKG_VERSION"),
        seed: cli.seed,
        wall_time_seconds: start.elapsed().as_secs_f64(),
        tolerances: tol,
        status,
        error,
        result,
    };
    // a sweep keeps stdout for CSV unless the CSV went to a file
    let written = if is_sweep && cli.out.is_none() {
        serde_json::to_string_pretty(&report::seventeen_digits(to_value(&report)))
            .map(|t| eprintln!("{t}"))
            .map_err(std::io::Error::from)
    } else if is_sweep {
        write_json(&report, None)
    } else {
        write_json(&report, cli.out.as_deref())
    };
    if let Err(e) = written {
        eprintln!("error: writing report: {e}");
        return ExitCode::from(report::EXIT_INPUT);
    }
    ExitCode::from(code)
}
