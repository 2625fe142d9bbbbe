use forge_core::ForgeError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, CompileError>;

#[derive(Debug, Error)]
pub enum CompileError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("graph contains a cycle through event {0}")]
    Cyclic(usize),
    #[error("{kind} gate takes {expected} inputs, got {got}")]
    Arity {
        kind: &'static str,
        expected: String,
        got: usize,
    },
    #[error("unsatisfiable: {0}")]
    Unsatisfiable(String),
    #[error("solver failed: {0}")]
    Solver(String),
    #[error(transparent)]
    Core(#[from] ForgeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
