use alloc::string::String;

/// Errors raised by the core library.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("recurrence order must be at least 2, got {0}")]
    RejectedOrder(usize),
    #[error("the last weight b_n must be nonzero")]
    RejectedLastWeightZero,
    #[error("expected {expected} initial values, got {actual}")]
    RejectedLength { expected: usize, actual: usize },
    #[error("initial conditions are all zero")]
    RejectedTrivial,
    #[error("non-finite value in input")]
    NonFinite,
    #[error("exact arithmetic requested for approximate inputs")]
    ExactModeUnavailable,
    #[error("{0}")]
    InvalidParameter(&'static str),
    #[error("{length} consecutive zero terms ending at index {end} (order {order}); arithmetic is inconsistent")]
    ZeroRunBoundViolated { length: usize, end: i64, order: usize },
    #[error("root iteration did not converge after {iterations} iterations (max residual {max_residual:e})")]
    NoConvergence { iterations: usize, max_residual: f64 },
    #[error("characteristic root of zero modulus")]
    RootModulusZero,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
