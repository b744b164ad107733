use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probabilities must be finite and non-negative (index {index}: {value})")]
    InvalidProbability { index: usize, value: f64 },

    #[error("state is not normalized: total weight {total} deviates from 1 by more than {tolerance:e}")]
    NotNormalized { total: f64, tolerance: f64 },

    #[error("empty state: at least the vacuum level is required")]
    Empty,

    #[error("cutoff {cutoff} too small: truncated tail weight {tail:e} exceeds {tolerance:e}")]
    CutoffTooSmall {
        cutoff: usize,
        tail: f64,
        tolerance: f64,
    },

    #[error("{0}")]
    Domain(String),

    #[error("invalid state spec: {0}")]
    InvalidSpec(String),

    #[error("unknown state kind `{0}`")]
    UnknownKind(String),

    #[error("invalid config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
