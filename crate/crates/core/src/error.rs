use thiserror::Error;

/// Errors produced by the signal models, estimators, bounds and harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ill-conditioned projection: reciprocal condition number {rcond:.3e}")]
    IllConditioned { rcond: f64 },

    #[error("singular {what} (reciprocal condition number {rcond:.3e})")]
    Singular { what: &'static str, rcond: f64 },

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("total masses differ: {source_mass} vs {target_mass}")]
    MassMismatch { source_mass: f64, target_mass: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
