//! Command-line harness over the transmission-problem solver: configuration
//! ingestion, verification suites (ellipticity, dual-route fundamental
//! solution, multiplier scans, estimate sweeps, manufactured solves, oracle
//! comparison) and deterministic CSV reports.
//!
//! Exit codes: `0` all verdicts pass, `1` a verdict fails or a computation
//! errors, `2` the configuration does not parse.

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod config;
pub mod report;

mod commands;

pub use config::RunConfig;

/// Harness-level error.  [`CliError::Config`] exits with code 2, every
/// other variant with code 1.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {place}: {message}")]
    Config { place: String, message: String },
    #[error("cannot write {place}: {message}")]
    Io { place: String, message: String },
    #[error(transparent)]
    Core(#[from] transmission_core::Error),
    #[error("{0}")]
    Invalid(String),
}

/// Solver and verification harness for an elliptic-parabolic transmission
/// problem on complementary half-spaces.
#[derive(Debug, Parser)]
#[command(name = "transmission", version, about)]
pub struct Cli {
    /// Configuration file (all keys have defaults; omit for the built-in
    /// Laplace / heat problem).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Output directory (overrides `[output] dir`).
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,

    /// Data-generator seed (overrides `[sweep] seed`).
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Integrability exponent of the norms (overrides `[sweep] p`).
    #[arg(long, global = true, value_name = "VALUE")]
    pub p: Option<f64>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify ellipticity, parameter-ellipticity, root splitting and the
    /// joint lower-bound constant.
    Check,

    /// Build the fundamental solution at one covariable and certify it by
    /// independent routes (contour integrals, Schur complement).
    Fundamental {
        /// Tangential covariable (nonzero).
        #[arg(long, allow_hyphen_values = true)]
        xi: f64,

        /// Spectral parameter as `re` or `re,im`.
        #[arg(long, default_value = "1", allow_hyphen_values = true)]
        q: String,

        /// Quadrature nodes of the contour route.
        #[arg(long, default_value_t = 512)]
        nodes: usize,
    },

    /// Scan the scaled symbol families for uniform derivative (multiplier)
    /// bounds, with a densified-grid stability study.
    MichlinScan,

    /// Sweep the a-priori estimates over the spectral parameter and report
    /// ratio plateaus.
    Estimates {
        /// Sweep even if the ellipticity gate fails.
        #[arg(long)]
        force: bool,

        /// Re-run at doubled tangential resolution and report stability.
        #[arg(long)]
        refine: bool,
    },

    /// Solve a manufactured problem (or re-solve dumped fields) and report
    /// residuals and recovery error.
    Solve {
        /// Spectral parameter as `re` or `re,im` (default: smallest sweep
        /// magnitude on the configured ray).
        #[arg(long, allow_hyphen_values = true)]
        q: Option<String>,

        /// Re-solve from a directory of previously dumped field files.
        #[arg(long, value_name = "DIR")]
        fields: Option<PathBuf>,

        /// Solve the homogeneous problem (zero interior data) only.
        #[arg(long)]
        homogeneous: bool,
    },

    /// Compare the exact per-mode solution against the banded
    /// finite-difference oracle, with an observed convergence order.
    OracleCompare {
        /// Oracle step size.
        #[arg(long, default_value_t = 1e-3)]
        h: f64,

        /// Verdict tolerance on the relative sup-norm error (default:
        /// `[tolerances] oracle`).
        #[arg(long)]
        tolerance: Option<f64>,
    },
}

/// Run a parsed invocation and translate the outcome into an exit code.
pub fn run(cli: Cli) -> i32 {
    match execute(cli) {
        Ok(true) => 0,
        Ok(false) => 1,
        Err(e @ CliError::Config { .. }) => {
            eprintln!("error: {e}");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn execute(cli: Cli) -> Result<bool, CliError> {
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    if let Some(out) = cli.out {
        cfg.out_dir = out;
    }
    if let Some(seed) = cli.seed {
        cfg.sweep.seed = seed;
    }
    if let Some(p) = cli.p {
        if p <= 1.0 {
            return Err(CliError::Invalid(format!("--p must exceed 1, got {p}")));
        }
        cfg.sweep.p = p;
    }
    match cli.command {
        Command::Check => commands::check::run(&cfg),
        Command::Fundamental { xi, q, nodes } => {
            commands::fundamental::run(&cfg, xi, &q, nodes)
        }
        Command::MichlinScan => commands::michlin::run(&cfg),
        Command::Estimates { force, refine } => commands::estimates::run(&cfg, force, refine),
        Command::Solve {
            q,
            fields,
            homogeneous,
        } => commands::solve::run(&cfg, q.as_deref(), fields.as_deref(), homogeneous),
        Command::OracleCompare { h, tolerance } => {
            commands::oracle::run(&cfg, h, tolerance.unwrap_or(cfg.tol.oracle))
        }
    }
}
