//! `shearlab` — configuration-driven experiment runner for the spectral
//! shear-flow laboratory: single simulations, viscosity sweeps, stability
//! tables, RAGE averages and enhanced-damping measurements.

mod config;
mod manifest;
mod reports;
mod runner;
mod snapshot;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ExperimentKind;
use crate::runner::{run, Overrides, RunError};

#[derive(Parser)]
#[command(name = "shearlab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Experiment configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweep-level parallelism.
    #[arg(long, default_value_t = 1)]
    parallel: usize,
    /// Random seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Run one time integration and record the probe series.
    Simulate(CommonArgs),
    /// Run the per-viscosity damping experiment for every listed ν.
    Sweep(CommonArgs),
    /// Eigenvalue tables: unstable counts against the negative index.
    Stability(CommonArgs),
    /// Time-averaged low-mode decay of a linearized Euler run.
    Rage(CommonArgs),
    /// Enhanced-damping ratio over the horizon τ/ν.
    Damping(CommonArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (kind, args) = match &cli.command {
        Command::Simulate(a) => (ExperimentKind::Simulate, a),
        Command::Sweep(a) => (ExperimentKind::Sweep, a),
        Command::Stability(a) => (ExperimentKind::Stability, a),
        Command::Rage(a) => (ExperimentKind::Rage, a),
        Command::Damping(a) => (ExperimentKind::Damping, a),
    };
    let overrides = Overrides {
        out: args.out.clone(),
        seed: args.seed,
        parallel: args.parallel,
    };
    match run(&args.config, kind, &overrides) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e @ RunError::Validation(_)) => {
            eprintln!("{e}");
            ExitCode::from(2)
        }
        Err(e @ RunError::Numerical(_)) => {
            eprintln!("{e}");
            ExitCode::from(3)
        }
    }
}
