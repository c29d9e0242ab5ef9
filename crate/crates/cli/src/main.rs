//! `memheat`: batch experiments for the polyharmonic heat equation with nonlinear memory.

mod commands;
mod config;
mod output;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;
use crate::verify::Suite;

/// Bad invocation or configuration (exit 2).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

impl From<config::ConfigError> for UsageError {
    fn from(e: config::ConfigError) -> Self {
        UsageError(e.to_string())
    }
}

/// A run that completed but did not produce what was asked for (exit 1).
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct CheckFailure(pub String);

#[derive(Parser, Debug)]
#[command(name = "memheat", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Experiment config (`key = value` lines)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory, overrides `output.dir`
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for random initial data, overrides `seed`
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for sweeps
    #[arg(long, global = true, env = "MEMHEAT_THREADS")]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the numerical property suites
    Verify {
        #[arg(value_enum, default_value = "all")]
        suite: Suite,
    },
    /// Integrate one configuration and write the trajectory
    Solve,
    /// Run the Cartesian product of the `sweep.*` ranges
    Sweep,
    /// Fit the blow-up rate and check the rate bounds
    Rate,
    /// Scan the Liouville certificate over `liouville.horizons`
    Liouville,
}

fn run(cli: Cli) -> anyhow::Result<ExitCode> {
    let mut cfg = match &cli.config {
        Some(p) => ExperimentConfig::load(p).map_err(UsageError::from)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    if let Some(k) = cli.threads {
        if k == 0 {
            return Err(UsageError("--threads must be at least 1".into()).into());
        }
        rayon::ThreadPoolBuilder::new().num_threads(k).build_global()?;
    }
    let out = cfg.output_dir.clone();
    match cli.command {
        Command::Verify { suite } => {
            let ok = verify::verify(suite, cfg.points, &out)?;
            return Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) });
        }
        Command::Solve => commands::solve(&cfg, &out)?,
        Command::Sweep => commands::sweep(&cfg, &out)?,
        Command::Rate => commands::rate(&cfg, &out)?,
        Command::Liouville => commands::liouville(&cfg, &out)?,
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
