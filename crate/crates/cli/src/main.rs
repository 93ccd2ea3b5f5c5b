//! `unruh`: config-driven driver emitting density matrices, Λ grids,
//! oracle convergence tables and continuum kernel slices.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical
//! non-convergence, 1 anything else (I/O).

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{0}")]
    Numeric(unruh_core::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<unruh_core::Error> for CliError {
    fn from(e: unruh_core::Error) -> Self {
        match e {
            unruh_core::Error::Convergence { .. } => CliError::Numeric(e),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "unruh",
    version,
    about = "Detector excitation along superposed accelerated trajectories"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Coherence-condition tolerance on |ω_j z_m - ω_i z_n|.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// Interaction time.
    #[arg(long = "T")]
    t: Option<f64>,
    /// Comma-separated list of Rindler frequencies q.
    #[arg(long, value_delimiter = ',')]
    q: Option<Vec<f64>>,
    /// Samples per grid axis.
    #[arg(long)]
    grid: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Joint and trajectory-traced states.
    State(Common),
    /// Internal state after measuring the trajectory.
    Measure(Common),
    /// Λ surfaces and axis profiles.
    LambdaGrid(Common),
    /// Closed forms against the quadrature oracles.
    OracleValidate(Common),
    /// Three-trajectory, twelve-level example and its -log10 table.
    PaperExample(Common),
    /// Continuous-spectrum kernel slices.
    Continuum(Common),
}

fn load(common: &Common, required: bool) -> Result<RunConfig, CliError> {
    match &common.config {
        Some(p) => config::load(p),
        None if required => Err(CliError::Config("this command needs --config".into())),
        None => Ok(RunConfig::default()),
    }
}

fn overrides(common: &Common) -> Overrides {
    Overrides {
        out: common.out.clone(),
        tol: common.tol,
        epsilon: common.epsilon,
        t: common.t,
        q: common.q.clone(),
        grid: common.grid,
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::State(c) => commands::state(&load(&c, true)?, &overrides(&c)),
        Command::Measure(c) => commands::measure(&load(&c, true)?, &overrides(&c)),
        Command::LambdaGrid(c) => commands::lambda_grid(&load(&c, false)?, &overrides(&c)),
        Command::OracleValidate(c) => commands::oracle_validate(&load(&c, false)?, &overrides(&c)),
        Command::PaperExample(c) => commands::paper_example(&load(&c, false)?, &overrides(&c)),
        Command::Continuum(c) => commands::continuum(&load(&c, true)?, &overrides(&c)),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("unruh: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
