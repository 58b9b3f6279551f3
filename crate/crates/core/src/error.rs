use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("series does not converge: {0}")]
    Divergence(String),

    #[error("kernel singularity: {0}")]
    Singularity(String),

    /// Quadrature stopped before reaching the requested tolerance.
    #[error("tolerance {tolerance:e} not reached: estimate {value} with error {error:e}")]
    Accuracy {
        value: f64,
        error: f64,
        tolerance: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid construction: {0}")]
    Construction(String),
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
