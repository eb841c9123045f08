//! `kinex`: run wealth-exchange simulations, parameter sweeps, law fits and
//! the country-data analysis, writing plot-ready CSV/JSON files.
//!
//! Exit codes: 0 success, 1 runtime or numeric failure, 2 usage or config failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::OutputFormat;

#[derive(Debug, Parser)]
#[command(name = "kinex", version, about = "Kinetic wealth-exchange simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// TOML configuration file; defaults apply to anything it leaves out.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Output format for summaries (overrides `format` in the config).
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One run: snapshots, histograms, Gini series, gamma fits, flow and tau.
    Simulate(commands::simulate::SimulateArgs),
    /// Grid of saving and surplus rates with replicate seeds.
    Sweep(commands::sweep::SweepArgs),
    /// Fit the flow/disparity and flow/tau laws to a sweep table.
    Fit(commands::fit::FitArgs),
    /// Derived columns and per-group fits for country indicator data.
    Empirical(commands::empirical::EmpiricalArgs),
}

/// A failed command, classified by exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

pub trait ResultExt<T> {
    fn usage(self) -> Result<T, Failure>;
    fn runtime(self) -> Result<T, Failure>;
}

impl<T, E: Into<anyhow::Error>> ResultExt<T> for Result<T, E> {
    fn usage(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Usage(e.into()))
    }

    fn runtime(self) -> Result<T, Failure> {
        self.map_err(|e| Failure::Runtime(e.into()))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(args) => commands::simulate::run(args),
        Command::Sweep(args) => commands::sweep::run(args),
        Command::Fit(args) => commands::fit::run(args),
        Command::Empirical(args) => commands::empirical::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
