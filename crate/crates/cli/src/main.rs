//! `parmax`: evaluate, optimize and compare mixed parallel systems from a JSON config.
//!
//! Exit status 0 on success, 1 on invalid input, 2 when the numerics fail (unreachable
//! tolerance, runaway simulation, failed consistency check).

mod config;
mod run;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{Overrides, RunConfig};
use run::{Command, Options};

#[derive(Debug, Parser)]
#[command(
    name = "parmax",
    version,
    about = "Expected lifetimes of mixed parallel systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Debug, Subcommand)]
enum Cmd {
    /// Expected lifetime for the given counts.
    Eval(Args),
    /// CSV of M(k, n - k) for two types.
    Curve(Args),
    /// Optimal composition of n components.
    Optimize(Args),
    /// Orderings, intersections and dominance changes of two types.
    Dominance(Args),
    /// Optimal split of n ancestors between two branching species.
    BgwPlan(Args),
    /// Monte Carlo estimate next to the analytic value.
    Simulate(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// JSON config file, or "-" for standard input.
    #[arg(long)]
    config: String,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Curve CSV for bgw-plan; defaults to the output path with a .csv extension.
    #[arg(long)]
    csv_out: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    reps: Option<usize>,
    /// Include the ascent trace in optimize output.
    #[arg(long)]
    trace: bool,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    eq_tol: Option<f64>,
    #[arg(long)]
    n_max: Option<usize>,
}

#[derive(Debug)]
pub enum Failure {
    Validation(String),
    Numeric(String),
}

impl Failure {
    fn exit_code(&self) -> u8 {
        match self {
            Failure::Validation(_) => 1,
            Failure::Numeric(_) => 2,
        }
    }
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Validation(m) => write!(f, "invalid input: {m}"),
            Failure::Numeric(m) => write!(f, "numeric failure: {m}"),
        }
    }
}

impl From<parmax::Error> for Failure {
    fn from(e: parmax::Error) -> Self {
        if e.is_numeric() {
            Failure::Numeric(e.to_string())
        } else {
            Failure::Validation(e.to_string())
        }
    }
}

fn configure_threads() -> Result<(), Failure> {
    let Ok(value) = std::env::var("PARMAX_THREADS") else {
        return Ok(());
    };
    let threads: usize = value.trim().parse().map_err(|_| {
        Failure::Validation(format!("PARMAX_THREADS must be an integer, got {value:?}"))
    })?;
    if threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| Failure::Validation(format!("cannot configure threads: {e}")))?;
    }
    Ok(())
}

fn write_to(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    match path {
        Some(p) => std::fs::write(p, text)
            .map_err(|e| Failure::Validation(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Validation(format!("cannot write output: {e}"))),
    }
}

fn execute(cli: Cli) -> Result<(), Failure> {
    configure_threads()?;
    let (command, args) = match cli.command {
        Cmd::Eval(a) => (Command::Eval, a),
        Cmd::Curve(a) => (Command::Curve, a),
        Cmd::Optimize(a) => (Command::Optimize, a),
        Cmd::Dominance(a) => (Command::Dominance, a),
        Cmd::BgwPlan(a) => (Command::BgwPlan, a),
        Cmd::Simulate(a) => (Command::Simulate, a),
    };
    let mut cfg = RunConfig::load(&args.config)?;
    cfg.apply(&Overrides {
        n: args.n,
        tol: args.tol,
        horizon: args.horizon,
        grid: args.grid,
        eq_tol: args.eq_tol,
        n_max: args.n_max,
        seed: args.seed,
        reps: args.reps,
    });
    let opts = Options {
        out: args.out,
        csv_out: args.csv_out,
        trace: args.trace,
    };
    let artifacts = run::run(command, &cfg, &opts)?;
    write_to(opts.out.as_deref(), &artifacts.main)?;
    if let Some((path, text)) = &artifacts.companion {
        write_to(Some(path), text)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("parmax: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
