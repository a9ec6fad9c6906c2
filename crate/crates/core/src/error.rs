use thiserror::Error;

/// Rejected configuration. The message always names the offending field.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("invalid configuration: {field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

impl ConfigError {
    pub fn new(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("zero pivot at row {index} (matrix is not diagonally dominant)")]
    ZeroPivot { index: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("non-finite value in state at step {step}")]
    Blowup { step: usize },
    #[error("unsupported configuration: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
}

/// A probe was called outside its contract (bad window, test function, kernel width...).
#[derive(Debug, Clone, PartialEq, Error)]
#[error("probe contract violated: {0}")]
pub struct ProbeError(pub String);

impl ProbeError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}
