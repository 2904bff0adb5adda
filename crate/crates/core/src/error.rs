use thiserror::Error;

/// Errors raised by the exact-arithmetic pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("no generic parameter point found after {0} attempts")]
    ExhaustedRetries(usize),

    #[error("series does not terminate within bound {0}")]
    NotTerminating(usize),

    #[error("{0} is not the square of a rational number")]
    NotASquare(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("enumeration budget of {0} configurations exceeded")]
    BudgetExceeded(usize),

    #[error("nonzero entry at row {row}, column {col} violates triangularity")]
    TriangularityViolation { row: usize, col: usize },

    #[error("eigenvalue collision: index {index} meets diagonal entry at {at}")]
    EigenvalueCollision { index: String, at: String },

    #[error("non-generic parameter point: {0}")]
    NonGeneric(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that mean "resample the parameter point".
    pub fn is_non_generic(&self) -> bool {
        matches!(
            self,
            Error::DivisionByZero(_) | Error::EigenvalueCollision { .. } | Error::NonGeneric(_)
        )
    }
}
