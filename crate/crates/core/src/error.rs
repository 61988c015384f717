use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A point needed by an integral or evaluation lies outside the owning patch.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("not a cocycle on simplex {simplex:?}: spread {stddev:e} exceeds {threshold:e}")]
    NonCocycle {
        simplex: Vec<usize>,
        stddev: f64,
        threshold: f64,
    },

    #[error("cannot build an integration path inside overlap {edge:?}: {reason}")]
    PathConstruction { edge: Vec<usize>, reason: String },

    #[error("undersampled loop: phase step {step} at sample {index} exceeds π")]
    UndersampledLoop { index: usize, step: f64 },

    #[error("invalid worldline: {0}")]
    InvalidWorldline(String),

    #[error("cocycle inconsistency: {0}")]
    CocycleInconsistency(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
