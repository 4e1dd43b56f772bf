use thiserror::Error;

/// Errors raised across the solver pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric positive definite (pivot {pivot:e} at row {row})")]
    NotSpd { row: usize, pivot: f64 },

    #[error("dense verification cap exceeded: n = {n} > {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular local block on element {element}")]
    SingularLocalBlock { element: usize },

    #[error("degenerate element {element} (det J = {det:e})")]
    DegenerateElement { element: usize, det: f64 },

    #[error("stabilization too small: element {element} has block eigenvalue {eigenvalue:e}")]
    NotCoercive { element: usize, eigenvalue: f64 },

    #[error("preconditioner breakdown: <z, r> = {0:e}")]
    Breakdown(f64),

    #[error("mesh format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
