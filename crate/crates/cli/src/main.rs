//! Command-line runner for the caromlab experiments.

mod config;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{Experiment, RunConfig};

/// Exit status when an experiment ran but a bound it checks was violated.
const EXIT_VIOLATION: u8 = 2;

#[derive(Parser)]
#[command(name = "caromlab", version, about = "Oracle-removal simulation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Override a config field, e.g. `--set trials=1000` or `--set scheme.points=12`.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
        /// Output directory; takes precedence over `output_path`.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the available experiments.
    ListExperiments,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::ListExperiments => {
            for e in Experiment::ALL {
                println!("{:<18} {}", e.name(), e.summary());
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, overrides, out } => match run(&config, &overrides, out) {
            Ok(0) => ExitCode::SUCCESS,
            Ok(_) => ExitCode::from(EXIT_VIOLATION),
            Err(e) => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}

/// Returns the number of violated bounds.
fn run(path: &PathBuf, overrides: &[String], out: Option<PathBuf>) -> Result<usize> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let config = RunConfig::parse(&text, overrides)?;
    let dir = out
        .or_else(|| config.output_path.clone())
        .unwrap_or_else(|| PathBuf::from("."));
    configure_threads()?;

    let outcome = experiments::run(&config)?;
    let (jsonl, csv) = output::write(&dir, &config, &outcome)?;
    println!("{}: wrote {} and {}", config.experiment.name(), jsonl.display(), csv.display());
    for v in &outcome.violations {
        eprintln!("bound violated: {v}");
    }
    Ok(outcome.violations.len())
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("CAROMLAB_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .with_context(|| format!("CAROMLAB_THREADS must be a positive integer, got {raw:?}"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .context("cannot configure the thread pool")
}
