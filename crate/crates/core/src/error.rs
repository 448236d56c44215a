use thiserror::Error;

/// Errors produced by the numerical kernels.
///
/// The variants fall into three broad families, see [`Error::category`]:
/// invalid input, numerical failure, and resource exhaustion.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("invalid group presentation: {0}")]
    Schema(String),

    #[error("relator {index} does not evaluate to the identity (residual {residual:.3e})")]
    RelatorViolation { index: usize, residual: f64 },

    #[error("construction failed: {0}")]
    Construction(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("length spectrum is not stabilized (depth {depth}); results would be unreliable")]
    Unstabilized { depth: usize },

    #[error("length spectrum is empty below cutoff {cutoff}")]
    EmptySpectrum { cutoff: f64 },

    #[error("primitive tail bound does not converge: {0}")]
    TailDivergence(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("word budget of {budget} exceeded")]
    Budget { budget: usize },

    #[error("mismatch: {0}")]
    Mismatch(String),

    #[error("experimental path requires explicit opt-in: {0}")]
    Experimental(String),
}

/// Coarse classification used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Validation,
    Numerical,
    Resource,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Domain(_)
            | Error::Range(_)
            | Error::Schema(_)
            | Error::RelatorViolation { .. }
            | Error::Mismatch(_)
            | Error::Experimental(_) => ErrorCategory::Validation,
            Error::Construction(_)
            | Error::Invariant(_)
            | Error::Quadrature(_)
            | Error::Unstabilized { .. }
            | Error::EmptySpectrum { .. }
            | Error::TailDivergence(_)
            | Error::SearchFailure(_) => ErrorCategory::Numerical,
            Error::Budget { .. } => ErrorCategory::Resource,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
