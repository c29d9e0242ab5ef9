use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("time stamps out of order: {t} precedes last stamp {last}")]
    Ordering { t: f64, last: f64 },

    #[error("fit window too short: {got} points, need at least {need}")]
    WindowTooShort { got: usize, need: usize },

    #[error("blow-up time estimation failed: {0}")]
    Estimation(String),

    #[error("picard iteration not contracting at T = {horizon} (last distances {last_distances:?})")]
    NotContracting {
        horizon: f64,
        last_distances: Vec<f64>,
    },

    #[error("picard iteration did not converge in {iterations} iterations (distance {distance:e})")]
    NotConverged { iterations: usize, distance: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam {
        field,
        reason: reason.into(),
    }
}
