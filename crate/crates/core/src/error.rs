use thiserror::Error;

/// Errors reported by the core operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {0} required by the multiindex support is missing")]
    MissingCoordinate(u32),

    #[error("invalid block range: {0}")]
    InvalidRange(String),

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("form is not dbar-closed (max residual coefficient {max_residual:e})")]
    NotClosed { max_residual: f64 },

    #[error("homogeneity norm for term {0} is not available; run khom_norm first")]
    NormUnavailable(String),

    #[error("insufficient quadrature nodes: need at least {needed}, got {got}")]
    InsufficientNodes { needed: usize, got: usize },

    #[error("certified bound unavailable: {0}")]
    NotCertifiable(String),

    #[error("multiindex {0} is not a stored term of the expansion")]
    MissingTerm(String),

    #[error("group element is singular and cannot be left-translated")]
    SingularElement,
}

pub type Result<T> = std::result::Result<T, Error>;
