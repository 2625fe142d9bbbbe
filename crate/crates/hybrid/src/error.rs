use forge_compile::CompileError;
use forge_core::ForgeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HybridError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("{n} spins exceed the enumeration limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("oracle failed at iteration {iteration}, evaluation {evaluation}: {message}")]
    Oracle {
        iteration: usize,
        evaluation: usize,
        message: String,
    },
    #[error("linear solve failed: {0}")]
    Numeric(String),
    #[error(transparent)]
    Core(#[from] ForgeError),
    #[error(transparent)]
    Compile(#[from] CompileError),
}

pub type Result<T> = std::result::Result<T, HybridError>;
