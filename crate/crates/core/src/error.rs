use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("degenerate body")]
    DegenerateBody,

    #[error("predicate did not converge after {iterations} iterations (distance in [{lower:e}, {upper:e}])")]
    NotConverged {
        iterations: usize,
        lower: f64,
        upper: f64,
    },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid point id {0}")]
    InvalidId(usize),

    #[error("threshold sequence not strictly increasing: exponent {0} <= 1")]
    NotIncreasing(f64),

    #[error("points ({a}, {b}): {source}")]
    Pair {
        a: usize,
        b: usize,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
