//! The `spyvspam` command line: `solve`, `verify`, `sweep` and `simulate`.
//!
//! Instance configs and result documents are JSON; strategy tables and sweep
//! indices are CSV. Every command returns its exit code instead of exiting,
//! so the whole contract can be driven from tests through [`run`].
//!
//! | code | meaning |
//! |------|---------|
//! | 0 | success (ties are reported, not fatal) |
//! | 1 | invalid config, arguments or input files |
//! | 2 | `solve`: structural solver and fallback oracle both failed |
//! | 3 | `verify`: the strategy pair is not an equilibrium |
//! | 4 | `simulate`: a statistic is off by more than 5 standard errors |

mod commands;
mod config;

use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

pub use commands::{
    cmd_simulate, cmd_solve, cmd_sweep, cmd_verify, parse_vary, Comparison, SimulateDocument, SolveDocument,
    SolveSource, VaryAxis,
};
pub use config::{InstanceConfig, OracleConfig, SimOptions, SolverConfig, SpammerSpec};

use crate::game::GameError;
use crate::sim::SimError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_SOLVER_FAILED: i32 = 2;
pub const EXIT_NOT_EQUILIBRIUM: i32 = 3;
pub const EXIT_STAT_MISMATCH: i32 = 4;

/// Environment variable read for log verbosity (`error` .. `trace`).
pub const LOG_ENV: &str = "SPYVSPAM_LOG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("invalid strategy file {path}: {reason}")]
    StrategyFile { path: PathBuf, reason: String },
}

impl CliError {
    pub(crate) fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "spyvspam",
    version,
    about = "Equilibria of the spy-vs-spammer classification game"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve an instance and write the equilibrium document.
    Solve(SolveArgs),
    /// Check whether a strategy pair is a Nash equilibrium.
    Verify(VerifyArgs),
    /// Solve over a grid of one or two varied parameters.
    Sweep(SweepArgs),
    /// Monte Carlo play against the analytic equilibrium values.
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    pub config: PathBuf,
    /// Write the result document here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Write an index,alpha,beta,spammer_pmf table.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub alpha: PathBuf,
    #[arg(long)]
    pub beta: PathBuf,
    #[arg(long, default_value_t = crate::oracle::DEFAULT_VERIFY_TOL)]
    pub tol: f64,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    pub config: PathBuf,
    /// `key=start:stop:steps`, inclusive; at most two.
    #[arg(long = "vary", required = true)]
    pub vary: Vec<String>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    pub config: PathBuf,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, requires = "beta")]
    pub alpha: Option<PathBuf>,
    #[arg(long, requires = "alpha")]
    pub beta: Option<PathBuf>,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = write!(err, "{e}");
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Sweep(a) => cmd_sweep(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_INVALID
        }
    }
}

/// Installs the logger, honouring [`LOG_ENV`]; safe to call more than once.
pub fn init_logging() {
    let env = env_logger::Env::new().filter_or(LOG_ENV, "warn");
    let _ = env_logger::Builder::from_env(env).try_init();
}
