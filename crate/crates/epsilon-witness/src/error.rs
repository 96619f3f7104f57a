use thiserror::Error;

/// Errors produced by the numerical kernels and scenario builders.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("matrix is not Hermitian within {tol:e} (deviation {deviation:e})")]
    NotHermitian { deviation: f64, tol: f64 },

    #[error("measurement is not projective within {tol:e} (deviation {deviation:e})")]
    NotProjective { deviation: f64, tol: f64 },

    #[error("operator norm bound violated: |A| = {norm} > 1")]
    NormViolation { norm: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eig:e})")]
    NotPositive { min_eig: f64 },

    #[error("trace is {trace}, expected 1")]
    BadTrace { trace: f64 },

    #[error("eigensolver failed to converge after {iterations} iterations")]
    EighConvergence { iterations: usize },

    #[error("parameter out of range: {0}")]
    InvalidParam(String),

    #[error("SDP solve failed: {0}")]
    Sdp(String),

    #[error("moment basis incomplete: sampling stopped after {samples} draws without span closure")]
    IncompleteBasis { samples: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn dim(context: &'static str, left: usize, right: usize) -> Self {
        Error::DimensionMismatch {
            context,
            left,
            right,
        }
    }

    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }
}
