use thiserror::Error;

/// Failure modes shared by every evaluation and inference routine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("support enumeration exceeds cap of {cap} size indices")]
    Capacity { cap: usize },
    #[error("singular matrix: {0}")]
    Singular(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("step-size failure at step {step}: growth factor {growth:e}")]
    StepSize { step: usize, growth: f64 },
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    IterationLimit { iterations: usize, residual: f64 },
    #[error("series truncation: {0}")]
    SeriesTruncation(String),
}

impl Error {
    /// Domain errors are caller mistakes; everything else is a numerical failure.
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_) | Error::Capacity { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
