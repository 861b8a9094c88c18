//! `lans-lab`: runs the LANS-α solver and the inequality harness from JSON
//! configuration files and writes CSV/JSON results into an output directory.
//!
//! Exit codes:
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success |
//! | 1 | I/O or internal error |
//! | 2 | malformed config, invalid parameters, unknown check id, usage error |
//! | 3 | solution blew up |
//! | 4 | Picard iteration did not converge |
//! | 5 | a check failed or a parameter gate rejected it |

pub mod commands;
pub mod config;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use lans_core::error::SolverError;
use thiserror::Error;

use crate::config::SweepAxis;

pub const EXIT_OK: i32 = 0;
pub const EXIT_IO: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_BLOW_UP: i32 = 3;
pub const EXIT_NOT_CONVERGED: i32 = 4;
pub const EXIT_CHECK_FAILED: i32 = 5;

/// Environment fallback for `--threads`.
pub const THREADS_ENV: &str = "LANS_LAB_THREADS";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("unknown check id `{0}`")]
    UnknownCheck(String),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Failed(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::UnknownCheck(_) => EXIT_CONFIG,
            CliError::Solver(e) => match e {
                SolverError::BlowUp { .. } => EXIT_BLOW_UP,
                SolverError::NotConverged(_) => EXIT_NOT_CONVERGED,
                SolverError::InvalidConfig(_)
                | SolverError::Inadmissible(_)
                | SolverError::Field(_)
                | SolverError::NegativeTime(_) => EXIT_CONFIG,
                SolverError::OutsideSupport { .. } => EXIT_IO,
            },
            CliError::Failed(_) => EXIT_CHECK_FAILED,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "lans-lab", version, about = "LANS-alpha solver and Besov inequality harness")]
pub struct Cli {
    /// Worker threads (falls back to LANS_LAB_THREADS, then to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Common {
    /// JSON configuration (a suite file for `verify`).
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory; nothing is written outside it.
    #[arg(long, default_value = "lans-out")]
    pub out: PathBuf,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Integrate with the exponential RK4 stepper.
    Solve(Common),
    /// Solve the mild formulation by Picard iteration.
    Picard(Common),
    /// Run an inequality suite.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Also write per-trial ratios as CSV.
        #[arg(long)]
        ratios: bool,
    },
    /// Sweep alpha, amplitude or grid size.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Overrides the axis named in the configuration.
        #[arg(long, value_enum)]
        axis: Option<SweepAxis>,
    },
    /// Dump the dyadic family and per-block Besov norms of a field.
    LpAnalyze(Common),
}

fn configure_threads(threads: Option<usize>) -> Result<(), CliError> {
    let n = match threads {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(v.trim().parse().map_err(|_| CliError::Config(format!("{THREADS_ENV}={v} is not a count")))?),
            Err(_) => None,
        },
    };
    if let Some(n) = n {
        if n == 0 {
            return Err(CliError::Config("thread count must be positive".into()));
        }
        // The global pool can only be set once per process.
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::debug!("thread pool already configured: {e}");
        }
    }
    Ok(())
}

/// Executes a parsed command line.
pub fn execute(cli: Cli) -> Result<(), CliError> {
    configure_threads(cli.threads)?;
    match cli.command {
        Command::Solve(c) => commands::solve(&c.config, &c.out, c.seed),
        Command::Picard(c) => commands::picard(&c.config, &c.out, c.seed),
        Command::Verify { common: c, ratios } => commands::verify(&c.config, &c.out, c.seed, ratios),
        Command::Sweep { common: c, axis } => commands::sweep(&c.config, &c.out, c.seed, axis),
        Command::LpAnalyze(c) => commands::lp_analyze(&c.config, &c.out, c.seed),
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the exit code, printing diagnostics to stderr.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).try_init();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
