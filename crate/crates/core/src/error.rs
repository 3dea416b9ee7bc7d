use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("resource guard exceeded: {0}")]
    ResourceLimit(String),

    #[error("matrix is singular to working precision: {0}")]
    Singular(String),

    #[error("branch tracking failed near t = {t}: phase step did not shrink below pi/2 after refinement")]
    BranchTracking { t: f64 },

    #[error("characteristic function does not decay at the grid end (|f(T)| = {magnitude:e}); atomic law suspected")]
    NonDecaying { magnitude: f64 },

    #[error("atomic law: use atoms output")]
    AtomicLaw,

    #[error("continuous law has no atoms")]
    ContinuousLaw,

    #[error("schema error at {path}: {message}")]
    Schema { path: String, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
