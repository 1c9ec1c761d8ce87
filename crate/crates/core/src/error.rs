use thiserror::Error;

/// Errors raised across the landscape toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("polynomial is identically zero on [{lo}, {hi}]")]
    IdenticallyZero { lo: f64, hi: f64 },

    #[error("quadrature did not reach tolerance {tol:e} (best estimate {estimate}, error {error:e})")]
    Accuracy { estimate: f64, error: f64, tol: f64 },

    #[error("nonsmooth point: {0}")]
    NonSmooth(String),

    #[error("not a critical point: gradient max-norm {0:e}")]
    NotCritical(f64),

    #[error("witness construction failed: {0}")]
    Witness(String),

    #[error("finiteness hypothesis violated: {0}")]
    FinitenessViolated(String),

    #[error("non-polynomial degeneracy on piece [{lo}, {hi}]")]
    Degenerate { lo: f64, hi: f64 },

    #[error("invalid specification: {0}")]
    InvalidSpec(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
