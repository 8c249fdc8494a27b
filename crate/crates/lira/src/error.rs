use thiserror::Error;

/// Errors shared across the workbench.
#[derive(Debug, Error)]
pub enum LiraError {
    #[error("syntax error at {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("elements belong to different algebras")]
    AlgebraMismatch,
    #[error("cochain rank does not match connection rank")]
    RankMismatch,
    #[error("the given 2-cochain is not a cocycle: d^2 f is nonzero on triple {0:?}")]
    NotACocycle((usize, usize, usize)),
    #[error("connection is not flat")]
    NotFlat,
    #[error("base ring is not a field (Q)")]
    NotFieldCase,
    #[error("connection does not have curvature type f: fails on pair {0:?}")]
    WrongCurvatureType((usize, usize)),
    #[error("d^1 h matches neither f-g nor g-f")]
    SignMismatch,
    #[error("the zero element has no symbol")]
    ZeroElement,
    #[error("matrix is not idempotent")]
    NotIdempotent,
    #[error("validation failed for {entity}: {reason}")]
    Validation { entity: String, reason: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LiraError>;
