use thiserror::Error;

/// Everything that can go wrong while building distributions, evaluating
/// rates or running an optimization.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("truncation would need n = {needed} but the cap is {cap}")]
    Truncation { needed: usize, cap: usize },

    #[error("root not bracketed: f(lo) = {f_lo}, f(hi) = {f_hi}")]
    NoBracket { f_lo: f64, f_hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("support mismatch at index {index}: p = {p} but q = 0")]
    SupportMismatch { index: usize, p: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("signal does not have rank-one photon-number blocks: {0}")]
    BlockEntropy(String),

    #[error("unphysical Gaussian state: {0}")]
    Physicality(String),

    #[error("objective is infeasible at every grid point")]
    AllInfeasible,
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
