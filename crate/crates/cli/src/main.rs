//! `teamsim` — deterministic experiment runner.
//!
//! Subcommands: `simulate` (replicated team runs with trajectory export),
//! `sweep` (trait grid sweeps plus trend checks), `evolve` (GA runs over
//! team compositions) and `compare` (per-trait dual-variant t-tests between
//! two groups). Every command requires an explicit seed and writes a
//! manifest echoing the fully resolved experiment, so outputs are
//! reproducible byte for byte at any `--jobs` setting.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exit code for configuration or argument problems.
const EXIT_INVALID_SPEC: u8 = 1;
/// Exit code for filesystem failures.
const EXIT_IO: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "teamsim",
    version,
    about = "Personality-driven team search simulations, sweeps, evolution and statistics"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run replicated simulations of one team and export trajectories.
    Simulate(SimulateArgs),
    /// Sweep each trait across a grid at several noise levels and check the
    /// expected trends.
    Sweep(SweepArgs),
    /// Evolve best- or worst-performing team compositions.
    Evolve(EvolveArgs),
    /// Compare two groups with pooled and Welch t-tests, per trait.
    Compare(CompareArgs),
}

/// Flags shared by every subcommand. Values given on the command line
/// override values from `--config`.
#[derive(Debug, Args, Clone)]
struct CommonArgs {
    /// Key=value configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (required here or in the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Replicate count (simulate: runs; sweep: runs per cell; evolve: GA
    /// runs).
    #[arg(long)]
    replicates: Option<usize>,
    /// Noise level. For sweep this selects the levels {0, value}.
    #[arg(long)]
    noise: Option<f64>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Evolve toward the best or the worst teams.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    /// Trait-bound preset.
    #[arg(long, value_enum)]
    population: Option<PopulationArg>,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum ModeArg {
    Best,
    Worst,
}

#[derive(Debug, Clone, Copy, clap::ValueEnum)]
enum PopulationArg {
    General,
    Sample,
}

#[derive(Debug, Args)]
struct CompareArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// CSV with the first group's rows.
    group_a: PathBuf,
    /// CSV with the second group's rows.
    group_b: PathBuf,
}

/// Error carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid configuration, flags or input contents.
    Spec(String),
    /// Filesystem failure.
    Io(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Spec(msg) => write!(f, "invalid spec: {msg}"),
            CliError::Io(msg) => write!(f, "i/o error: {msg}"),
        }
    }
}

impl From<teamsim_core::Error> for CliError {
    fn from(err: teamsim_core::Error) -> Self {
        CliError::Spec(err.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help/--version exit cleanly; anything else is a bad spec.
            let code = if err.use_stderr() {
                EXIT_INVALID_SPEC
            } else {
                0
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };

    let jobs = match &cli.command {
        Command::Simulate(args) => args.common.jobs,
        Command::Sweep(args) => args.common.jobs,
        Command::Evolve(args) => args.common.jobs,
        Command::Compare(args) => args.common.jobs,
    };
    if let Some(jobs) = jobs {
        if jobs == 0 {
            eprintln!("invalid spec: --jobs must be at least 1");
            return ExitCode::from(EXIT_INVALID_SPEC);
        }
        if let Err(err) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("failed to configure worker pool: {err}");
            return ExitCode::from(EXIT_IO);
        }
    }

    let outcome = match cli.command {
        Command::Simulate(args) => commands::simulate::run(&args.common),
        Command::Sweep(args) => commands::sweep::run(&args.common),
        Command::Evolve(args) => commands::evolve::run(&args),
        Command::Compare(args) => commands::compare::run(&args),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("{err}");
            match err {
                CliError::Spec(_) => ExitCode::from(EXIT_INVALID_SPEC),
                CliError::Io(_) => ExitCode::from(EXIT_IO),
            }
        }
    }
}
