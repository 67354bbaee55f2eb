use std::fmt;
use std::process::ExitCode;

use dicke_core::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
    Empty(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Empty(_) => 4,
        })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Empty(m) => write!(f, "empty result: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::InvalidParameter { .. } | Error::Domain(_) | Error::InvalidGrid(_) | Error::EnergyUnreachable { .. } => CliError::Usage(msg),
            Error::Io(_) => CliError::Io(msg),
            Error::IntegrationFailure { .. }
            | Error::CutoffTooSmall { .. }
            | Error::DimensionOverflow { .. }
            | Error::NonConvergence { .. }
            | Error::NormLoss { .. } => CliError::Numerical(msg),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
