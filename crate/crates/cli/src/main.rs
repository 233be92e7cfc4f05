//! `ssde`: analyze and solve self-similar differential equations from JSON
//! problem files, writing plot data as CSV.

mod commands;
mod problem;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Failure classes, each with its own exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error(transparent)]
    Core(#[from] ssde_core::Error),
    #[error("{0}")]
    Inconsistent(String),
    #[error("NotConverged: {0}")]
    NotConverged(String),
    #[error("{0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use ssde_core::Error as E;
        match self {
            CliError::Invalid(_) | CliError::Io(_) => 2,
            CliError::Inconsistent(_) => 3,
            CliError::NotConverged(_) => 4,
            CliError::Core(e) => match e {
                E::NoAdmissibleA | E::MissingTargetA | E::TargetAMismatch { .. } | E::LConditionViolated { .. } => 3,
                E::NotContractive { .. } => 5,
                _ => 2,
            },
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ssde", version, about = "Self-similar differential equations: analysis and Picard iteration")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print breakpoints, diagnostics and the boundary-system solution.
    Analyze {
        path: PathBuf,
        /// Print the problem back as normalized JSON instead of the report.
        #[arg(long)]
        echo: bool,
    },
    /// Iterate to a fixed point and write the solution as CSV.
    Solve {
        path: PathBuf,
        /// Solution CSV (standard output when omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Run report (standard error when omitted).
        #[arg(long)]
        report: Option<PathBuf>,
        /// Iterate even when the contraction factor is not below 1.
        #[arg(long)]
        force: bool,
        #[command(flatten)]
        settings: Settings,
    },
    /// Write the first k iterates f_0..f_k as CSV files.
    Iterate {
        path: PathBuf,
        k: usize,
        #[arg(long)]
        outdir: PathBuf,
        #[arg(long)]
        force: bool,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Residual sup|y' − P(y)| (or y'' for order 2) away from breakpoints.
    Residual {
        path: PathBuf,
        /// CSV of y; defaults to the file's initial iterate.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long)]
        grid: Option<usize>,
    },
    /// Sample a bump function with plateau [b, c] and support [a, d].
    #[command(allow_negative_numbers = true)]
    Bump {
        a: String,
        b: String,
        c: String,
        d: String,
        /// Number of sample nodes.
        #[arg(long, default_value_t = 1001)]
        grid: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug, Clone, Copy, clap::Args)]
pub struct Settings {
    /// Sub-intervals per piece (overrides the file).
    #[arg(long)]
    pub grid: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iter: Option<usize>,
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Analyze { path, echo } => commands::analyze(&path, echo),
        Command::Solve {
            path,
            out,
            report,
            force,
            settings,
        } => commands::solve(&path, out.as_deref(), report.as_deref(), force, settings),
        Command::Iterate {
            path,
            k,
            outdir,
            force,
            grid,
        } => commands::iterate(&path, k, &outdir, force, grid),
        Command::Residual { path, input, grid } => commands::residual(&path, input.as_deref(), grid),
        Command::Bump { a, b, c, d, grid, out } => commands::bump([&a, &b, &c, &d], grid, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Io(e)) if e.kind() == std::io::ErrorKind::BrokenPipe => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
