use thiserror::Error;

/// Errors produced by basis construction, generator assembly and the solvers.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The stationary distribution is not unique (no pumping: dark states).
    #[error("non-unique steady state: {0}")]
    NonUniqueSteadyState(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// A correlation function whose numerator and denominator both vanish.
    #[error("undefined correlation: {0}")]
    UndefinedCorrelation(String),
}

pub type Result<T> = std::result::Result<T, Error>;
