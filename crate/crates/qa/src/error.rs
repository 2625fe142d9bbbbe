use forge_core::ForgeError;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, QaError>;

#[derive(Debug, Error)]
pub enum QaError {
    #[error("{num_qubits} qubits exceeds the limit of {limit} for {what}")]
    TooLarge {
        num_qubits: usize,
        limit: usize,
        what: &'static str,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("eigensolver did not converge: residual {residual:e} after {iterations} iterations")]
    NoConvergence { residual: f64, iterations: usize },
    #[error("norm drifted by {deviation:e} in one step at t = {t}")]
    NormAudit { deviation: f64, t: f64 },
    #[error("step size underflow at t = {t} (dt = {dt:e})")]
    StepUnderflow { t: f64, dt: f64 },
    #[error("state has {got} amplitudes, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Core(#[from] ForgeError),
}
