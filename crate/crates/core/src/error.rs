use thiserror::Error;

/// Errors raised across the crate.
///
/// Numerical payloads are stored as `f64` regardless of the scalar type used
/// by the caller so that the error type stays non-generic.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid fractional order {0}: must lie in (0, 1]")]
    InvalidOrder(f64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("degenerate order: {0}")]
    DegenerateOrder(String),

    #[error("numerical failure in {context}: partial value {partial}, error bound {bound}")]
    NumericalFailure {
        context: String,
        partial: f64,
        bound: f64,
    },

    #[error("singular parameters: `{name}` is zero in a denominator")]
    SingularParameter { name: &'static str },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invariant violated at step {step}: {reason}")]
    InvariantViolation { step: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn numerical(context: impl Into<String>, partial: f64, bound: f64) -> Self {
        Error::NumericalFailure {
            context: context.into(),
            partial,
            bound,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
