use thiserror::Error;

/// Errors raised by the channel and analysis routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not Hermitian (max |X - X^H| = {deviation:.3e})")]
    NotHermitian { deviation: f64 },

    #[error("map is not completely positive (min Choi eigenvalue {min_eigenvalue:.3e} below -{tolerance:.1e})")]
    NotCompletelyPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("map is not trace preserving (deviation {deviation:.3e} exceeds {tolerance:.1e})")]
    NotTracePreserving { deviation: f64, tolerance: f64 },

    #[error("operator is not an isometry (|V^H V - I| = {deviation:.3e} exceeds {tolerance:.1e})")]
    NotIsometry { deviation: f64, tolerance: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid witness: {0}")]
    InvalidWitness(String),

    #[error("channel family is empty")]
    EmptyFamily,

    #[error("malformed channel file: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn mismatch(msg: impl Into<String>) -> Error {
    Error::DimensionMismatch(msg.into())
}
