//! `cyclewalk`: exact catch probabilities, bounds and simulation for the
//! hunter and rabbit game on the N-cycle.

mod commands;
mod config;
mod output;

use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use commands::Artifact;
use config::RunConfig;

#[derive(Parser)]
#[command(name = "cyclewalk", version, about = "Hunter vs rabbit on the cycle graph")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Wrapped n-step distribution (n = --horizon) and φ at the Fourier frequencies.
    Dist(RunConfig),
    /// Sandwich bounds and the closed-form lower curve for each N.
    Bounds(RunConfig),
    /// Exact per-start catch probabilities against the chosen hunter.
    Exact(RunConfig),
    /// Monte Carlo catch-time histogram with a Wilson interval.
    Simulate(RunConfig),
    /// Regenerate a reference table or per-start figure data set.
    Reproduce {
        #[arg(value_enum)]
        artifact: Artifact,
        /// N grid for `limit`.
        #[arg(long, default_value = "100,200,500,1000,2000")]
        grid: String,
        #[command(flatten)]
        config: RunConfig,
    },
}

fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var("CYCLEWALK_THREADS") {
        let n: usize = v.trim().parse().with_context(|| format!("CYCLEWALK_THREADS={v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<commands::Footer> {
    init_threads()?;
    match &cli.command {
        Command::Dist(c) => commands::dist(c),
        Command::Bounds(c) => commands::bounds_cmd(c),
        Command::Exact(c) => commands::exact(c),
        Command::Simulate(c) => commands::simulate(c),
        Command::Reproduce { artifact, grid, config } => commands::reproduce(config, *artifact, grid),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(footer) if footer.passed() => ExitCode::SUCCESS,
        Ok(_) => {
            eprintln!("cyclewalk: invariant check failed, see summary");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("cyclewalk: {e:#}");
            ExitCode::FAILURE
        }
    }
}
