use std::fmt::Display;

use thiserror::Error;

/// Errors reaching the command line, split by exit status.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad input, configuration or parameters (exit 2).
    #[error("{0}")]
    Validation(String),
    /// A solver, oracle or integration step failed (exit 3).
    #[error("{0}")]
    Solver(String),
}

impl CliError {
    pub fn validation(e: impl Display) -> Self {
        CliError::Validation(e.to_string())
    }

    pub fn solver(e: impl Display) -> Self {
        CliError::Solver(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Solver(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
