//! Command-line front end behind the `gmflow` binary.

mod commands;
pub mod config;
pub mod reproduce;

use std::ffi::OsString;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use crate::error::{Error, Result};
pub use config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Simulate,
    Sweep,
    MapParams,
    CheckConditions,
    TruncationOrder,
    RateCheck,
    Reproduce,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Self::Simulate => "simulate",
            Self::Sweep => "sweep",
            Self::MapParams => "map-params",
            Self::CheckConditions => "check-conditions",
            Self::TruncationOrder => "truncation-order",
            Self::RateCheck => "rate-check",
            Self::Reproduce => "reproduce",
        }
    }
}

/// Simulate, analyse and map generalized momentum methods.
#[derive(Debug, Parser)]
#[command(name = "gmflow", version)]
pub struct Cli {
    pub command: Command,
    /// JSON experiment configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if needed).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the objective seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Exit 0 even when the run diverges.
    #[arg(long)]
    pub allow_divergence: bool,
}

/// Result of a subcommand, mapped to the process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// A check ran but did not pass.
    Failed,
    Diverged,
}

impl Outcome {
    pub fn code(self) -> u8 {
        match self {
            Self::Success => 0,
            Self::Failed => 1,
            Self::Diverged => 2,
        }
    }
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    let text = std::fs::read_to_string(&cli.config)
        .map_err(|e| Error::InvalidConfig(format!("cannot read {}: {e}", cli.config.display())))?;
    let cfg = ExperimentConfig::from_json(&text)?;
    cfg.check_kind(cli.command.name())?;
    let ctx = commands::Context {
        out: cli.out.clone(),
        seed: cli.seed.or(cfg.seed),
        allow_divergence: cli.allow_divergence,
    };
    match cli.command {
        Command::Simulate => commands::simulate(&cfg, &ctx),
        Command::Sweep => commands::sweep(&cfg, &ctx),
        Command::MapParams => commands::map_params(&cfg),
        Command::CheckConditions => commands::check_conditions(&cfg, &ctx),
        Command::TruncationOrder => commands::truncation_order(&cfg, &ctx),
        Command::RateCheck => commands::rate_check(&cfg, &ctx),
        Command::Reproduce => commands::reproduce(&cfg, &ctx),
    }
}

/// Parses `args`, runs the command and returns the exit code: 0 on success,
/// 1 on invalid input or a failed check, 2 on divergence.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(Error::Divergence(msg)) => {
            eprintln!("gmflow: divergence: {msg}");
            ExitCode::from(Outcome::Diverged.code())
        }
        Err(e) => {
            eprintln!("gmflow: {e}");
            ExitCode::from(1)
        }
    }
}
