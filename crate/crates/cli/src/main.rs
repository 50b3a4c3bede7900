use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use qubit_feedback_cli::{run, RunOptions, Subcommand};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    /// Stationary states over a control grid.
    Stationary,
    /// Time series, numeric and (where possible) analytic.
    Trajectory,
    /// Δ_A and Δ_B grids and their zero sets.
    Locus,
    /// θ, θ̇, sgn_θ, Φ and switch candidates for u = ±1.
    Switching,
    /// Built-in invariant suite.
    Check,
}

/// Qubit feedback control: emits plot-ready CSV series and JSON summaries.
#[derive(Debug, Parser)]
#[command(name = "qfb", version)]
struct Args {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (JSON). Built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Leave out the generation-time metadata.
    #[arg(long)]
    no_metadata: bool,
    /// Override the step size from the config.
    #[arg(long)]
    dt: Option<f64>,
    /// Seed for randomized sampling in `check`.
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let sub = match args.command {
        Command::Stationary => Subcommand::Stationary,
        Command::Trajectory => Subcommand::Trajectory,
        Command::Locus => Subcommand::Locus,
        Command::Switching => Subcommand::Switching,
        Command::Check => Subcommand::Check,
    };
    let opts = RunOptions {
        config: args.config.as_deref(),
        out: &args.out,
        metadata: !args.no_metadata,
        dt: args.dt,
        seed: args.seed,
    };
    match run(sub, &opts) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("qfb: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
