use thiserror::Error;

/// Errors raised by the library.
///
/// Quadrature non-convergence is normally carried inside
/// [`QuadratureResult`](crate::numerics::QuadratureResult); it only becomes an
/// error when a caller asks for a plain value via
/// [`QuadratureResult::require`](crate::numerics::QuadratureResult::require).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter `{name}` = {value} is outside its domain: {reason}")]
    ParameterDomain {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("{quantity} is undefined at x = {x}: {reason}")]
    EvaluationDomain {
        quantity: &'static str,
        x: f64,
        reason: &'static str,
    },

    #[error("{0} diverges")]
    Divergence(String),

    #[error("quadrature for {what} did not converge (value {value}, error estimate {error_estimate:e})")]
    NotConverged {
        what: String,
        value: f64,
        error_estimate: f64,
    },

    #[error("no sign change of the function on [{lo}, {hi}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("not implemented: {0}")]
    Unimplemented(String),

    #[error("sampling failed: {0}")]
    Sampling(String),

    #[error("cannot parse `{input}`: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
