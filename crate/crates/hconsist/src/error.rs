use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    /// A caller broke an operation contract (e.g. a constrained loss on a
    /// hypothesis whose scores do not sum to zero).
    #[error("contract violated: {0}")]
    Contract(String),

    #[error("unsupported hypothesis set: {0}")]
    Unsupported(String),

    #[error("optimizer did not converge: {message} (best value {best})")]
    Convergence { message: String, best: f64 },

    #[error("tsybakov envelope infeasible: {0}")]
    EnvelopeInfeasible(String),

    #[error("distribution generation failed: {0}")]
    Generation(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// An objective or closed form evaluated to NaN or ±∞.
    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
