//! Command-line front end: JSON config in, CSV and JSON out.
//!
//! Exit codes: 0 success, 2 configuration error, 3 numerical failure,
//! 1 for I/O errors.

mod commands;
mod config;
mod figures;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use casimir_decoherence::io::IoError;
use casimir_decoherence::Error;
use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(
    name = "casimir-decoherence",
    version,
    about = "Radiation-pressure decoherence of a moving mirror"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long, global = true, env = "CASIMIR_DECOHERENCE_THREADS")]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// ζ(u), ξ and σ tables.
    Spectrum,
    /// Γ(t), D₁(t), D₂(t), ΔM₂(t) traces.
    Coeffs,
    /// Fokker-Planck evolution of a cat state and its coherence decay.
    Evolve,
    /// Entropy minimization over squeezed states.
    Sieve,
    /// Photon-pair emission by a briefly kicked mirror.
    Pairs,
    /// Plate decoherence times in SI units.
    Thermal,
    /// Figure presets.
    Figures {
        #[arg(value_parser = clap::value_parser!(u8).range(1..=3))]
        which: u8,
    },
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. }
            | Error::CflViolation { .. }
            | Error::GridTooCoarse { .. }
            | Error::Unsupported(_) => CliError::Config(e.to_string()),
            Error::QuadratureNotConverged { .. } | Error::Divergent(_) | Error::OptimizerNotConverged(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::Io(e.to_string())
    }
}

fn need_config(cli: &Cli) -> Result<&Path, CliError> {
    cli.config
        .as_deref()
        .ok_or_else(|| CliError::Config("--config <path> is required".into()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Config("--threads must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    let out = cli.out.as_path();
    match cli.command {
        Command::Spectrum => commands::spectrum(&config::load(need_config(cli)?)?, out),
        Command::Coeffs => commands::coeffs(&config::load(need_config(cli)?)?, out),
        Command::Evolve => commands::evolve(&config::load(need_config(cli)?)?, out),
        Command::Sieve => commands::sieve(&config::load(need_config(cli)?)?, out),
        Command::Pairs => commands::pairs(&config::load(need_config(cli)?)?, out),
        Command::Thermal => commands::thermal(&config::load(need_config(cli)?)?, out),
        Command::Figures { which } => figures::figure(which, out),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
