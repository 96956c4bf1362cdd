//! `ris-isac`: experiment harness for the joint precoder / RIS phase design.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 every run was
//! infeasible, 3 internal failure.

mod args;
mod report;
mod runs;

use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use ris_isac_core::ScenarioConfig;

use args::{Cli, Command};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0:#}")]
    Usage(anyhow::Error),
    #[error("every run was infeasible")]
    InfeasibleAll,
    #[error("{0:#}")]
    Internal(anyhow::Error),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::InfeasibleAll => 2,
            CliError::Internal(_) => 3,
        }
    }
}

pub fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(anyhow::anyhow!(msg.into()))
}

fn load_config(path: Option<&Path>) -> Result<ScenarioConfig, CliError> {
    match path {
        None => Ok(ScenarioConfig::default()),
        Some(p) => ScenarioConfig::load(p).map_err(|e| CliError::Usage(e.into())),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Converge(a) => {
            let config = load_config(a.config.as_deref())?;
            runs::converge(&config, &a)
        }
        Command::Sweep(a) => {
            let config = load_config(a.config.as_deref())?;
            runs::sweep(&config, &a)
        }
        Command::Report(a) => report::report(&a),
    }
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
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
