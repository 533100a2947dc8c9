use std::process::ExitCode;

use thiserror::Error;

/// Failures surfaced to the shell, each with a fixed exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable input, malformed document, or invalid flag value (exit 2).
    #[error("{0}")]
    Parse(String),
    /// Polynomial is singular (exit 3).
    #[error("polynomial is not regular (det P(λ) vanishes identically)")]
    NotRegular,
    /// Any numerical failure or undefined quantity (exit 4).
    #[error("{0}")]
    Numeric(String),
    /// Perturbed eigenvalue could not be matched unambiguously (exit 5).
    #[error("{0}")]
    Ambiguous(String),
    /// A check ran to completion and found violations (exit 1).
    #[error("{0}")]
    CheckFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            CliError::CheckFailed(_) => 1,
            CliError::Parse(_) => 2,
            CliError::NotRegular => 3,
            CliError::Numeric(_) => 4,
            CliError::Ambiguous(_) => 5,
        })
    }
}

impl From<polycond::Error> for CliError {
    fn from(e: polycond::Error) -> Self {
        use polycond::Error as E;
        match e {
            E::InvalidInput(msg) => CliError::Parse(msg),
            E::NotRegular => CliError::NotRegular,
            e @ E::AmbiguousMatch { .. } => CliError::Ambiguous(e.to_string()),
            e => CliError::Numeric(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Parse(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
