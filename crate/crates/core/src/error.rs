use thiserror::Error;

pub type Result<T> = std::result::Result<T, ForgeError>;

#[derive(Debug, Error)]
pub enum ForgeError {
    #[error("assignment length {got} does not match model size {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("assignment is in {got} form but the model expects {expected} form")]
    FormMismatch {
        expected: &'static str,
        got: &'static str,
    },
    #[error("invalid value {value} at position {index} for {form} form")]
    InvalidValue {
        index: usize,
        value: i8,
        form: &'static str,
    },
    #[error("variable index {index} out of range for {num_vars} variables")]
    IndexOutOfRange { index: usize, num_vars: usize },
    #[error("non-finite coefficient {0}")]
    NonFinite(f64),
    #[error("graph dimensions must be at least 1 (got rows={rows}, cols={cols}, shore={shore})")]
    ZeroDimension {
        rows: usize,
        cols: usize,
        shore: usize,
    },
    #[error("problem of {num_vars} variables exceeds the limit of {limit}")]
    TooLarge { num_vars: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed problem file: {0}")]
    Format(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
