use thiserror::Error;

/// Failures raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption violated: {0}")]
    Assumption(String),
    #[error("obstacle height {h} is not below the threshold h_* = {h_star}: no minimizer")]
    Threshold { h: f64, h_star: f64 },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("slope blow-up: {0}")]
    SlopeBlowup(String),
    #[error("mixed-sign input: {0}")]
    MixedSign(String),
    #[error("no convergence: {0}")]
    NonConvergence(String),
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
