use thiserror::Error;

/// Errors produced by the hardwall library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("invalid observable grid: {0}")]
    InvalidGrid(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature did not converge: estimated error {err:.3e} > tolerance {tol:.3e}")]
    Quadrature { err: f64, tol: f64 },

    /// A quantity that is positive in exact arithmetic came out nonpositive.
    #[error("precision failure: {0}")]
    Precision(String),

    #[error("root finding failed: {0}")]
    RootFinding(String),
}

pub type Result<T> = std::result::Result<T, Error>;
