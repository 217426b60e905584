//! Driver for the `wavelet-asym` command line.

pub mod commands;
pub mod config;
pub mod record;

use cwt_asymptotics::Error;

pub use config::{Cli, Command, CommandKind, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(Error),
    #[error("golden values not certified: {0}")]
    Uncertified(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) | CliError::Uncertified(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    /// Rejected requests are configuration errors; everything else is numeric.
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidArgument(_) | Error::InsufficientCoefficients { .. } | Error::WrongWavelet { .. } | Error::NonzeroLeadingCoefficient { .. } => {
                CliError::Config(e.to_string())
            }
            other => CliError::Numeric(other),
        }
    }
}

pub fn run(cli: &Cli, arguments: &[String]) -> Result<(), CliError> {
    let cfg = RunConfig::resolve(&cli.command)?;
    match cfg.command {
        CommandKind::Eval => commands::run_eval(&cfg, arguments),
        CommandKind::Converge => commands::run_converge(&cfg, arguments),
        CommandKind::Golden => commands::run_golden(&cfg),
        CommandKind::Hypotheses => commands::run_hypotheses(&cfg, arguments),
    }
}
