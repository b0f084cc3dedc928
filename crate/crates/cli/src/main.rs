//! `cavqed`: simulation, correlation, fitting and extraction pipelines for
//! cavity-coupled single emitters.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::Ctx;
use crate::config::RunConfig;
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "cavqed", version, about = "Cavity-emitter simulation and analysis pipelines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    /// Flat key-value TOML config with unit-suffixed keys.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Master seed; overrides the config's `seed` key.
    #[arg(long)]
    seed: Option<u64>,
    /// Output path (a file prefix for `simulate`); overrides the config's `out` key.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Time-tag file format written by `simulate` (default bin); other commands write text only.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Bin,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Kinetic Monte Carlo of the emitter and detector chain; writes time-tag files.
    Simulate(Common),
    /// Cross-correlation histogram of two time-tag streams.
    Correlate(Common),
    /// Start-stop arrival histogram of photons relative to a laser sync.
    Lifetime(Common),
    /// Least-squares fit of a model to a CSV curve; writes JSON.
    Fit(Common),
    /// Upper bound on the quantum efficiency from lifetime and flux data; writes JSON.
    #[command(name = "qe-bound")]
    QeBound(Common),
    /// Detunings and enhancement from a tuning-record table; writes JSON.
    #[command(name = "detune-report")]
    DetuneReport(Common),
}

type Handler = fn(&Ctx) -> Result<(), CliError>;

fn run(cli: Cli) -> Result<(), CliError> {
    let (name, common, run): (&'static str, Common, Handler) = match cli.command {
        Command::Simulate(c) => ("simulate", c, commands::simulate::run),
        Command::Correlate(c) => ("correlate", c, commands::correlate::run),
        Command::Lifetime(c) => ("lifetime", c, commands::lifetime::run),
        Command::Fit(c) => ("fit", c, commands::fit::run),
        Command::QeBound(c) => ("qe-bound", c, commands::qe_bound::run),
        Command::DetuneReport(c) => ("detune-report", c, commands::detune::run),
    };
    let format = match (name, common.format) {
        ("simulate", f) => f.unwrap_or(Format::Bin),
        (_, Some(Format::Bin)) => {
            return Err(CliError::config(format!("--format bin is only supported by simulate, not {name}")))
        }
        _ => Format::Csv,
    };
    let cfg = RunConfig::load(&common.config)?;
    let config_seed = cfg.opt_u64("seed")?;
    let out = match common.out {
        Some(p) => Some(p),
        None => cfg.opt_path("out")?,
    };
    let ctx = Ctx { command: name, seed: common.seed.or(config_seed), out, format, cfg };
    run(&ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.exit as u8)
        }
    }
}
