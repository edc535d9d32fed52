use thiserror::Error;

/// Errors raised by the numerical layers and pipelines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter violated a precondition (pole, guard, bad direction).
    #[error("domain error: {0}")]
    Domain(String),

    /// A quadrature or iteration ran out of budget.
    #[error("no convergence after {evaluations} evaluations (best estimate {estimate:e}, error estimate {abs_error:e})")]
    NonConvergence {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
    },

    /// A multi-stage pipeline could not produce its result.
    #[error("pipeline failure: {0}")]
    Pipeline(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
