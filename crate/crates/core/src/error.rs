use thiserror::Error;

/// Errors raised by the benchmark toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("malformed state: {0}")]
    MalformedState(String),

    #[error("mode index {index} out of range for a {modes}-mode state")]
    ModeOutOfRange { index: usize, modes: usize },

    #[error("unphysical channel: sqrt(n_x*n_p) = {noise:.6} < |1 - t_x*t_p|/2 = {required:.6}")]
    UnphysicalChannel { noise: f64, required: f64 },

    #[error("no trial was accepted out of {trials}")]
    NoAcceptedTrials { trials: u64 },

    #[error("insufficient samples: {count} on one quadrature, need at least {required}")]
    InsufficientSamples { count: u64, required: u64 },

    #[error("Fock truncation budget exceeded: estimated error {estimate:.3e} > budget {budget:.3e}")]
    TruncationBudget { estimate: f64, budget: f64 },

    #[error("channel document: {0}")]
    Document(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}

pub(crate) fn require_finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(invalid(name, format!("must be finite, got {value}")))
    }
}
