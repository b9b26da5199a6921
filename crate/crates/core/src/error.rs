use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("operands have different variable counts ({0} vs {1})")]
    NvarsMismatch(usize, usize),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix of size {size} exceeds the determinant bound {limit}")]
    TooLarge { size: usize, limit: usize },
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("division by the zero polynomial")]
    ZeroDivisor,
    #[error("polynomial must satisfy p(0) = 1")]
    NotNormalized,
    #[error("expected degree {expected}, got {found}")]
    Degree { expected: String, found: i64 },
    #[error("univariate polynomial is not monic")]
    NotMonic,
    #[error("polynomial is not real-zero")]
    NotRealZero,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("determinant identity does not hold: {0}")]
    DetMismatch(String),
    #[error("certificate does not verify: {0}")]
    InvalidCertificate(String),
    #[error("degree invariant violated: {0}")]
    DegreeInvariant(String),
    #[error("Hermite matrix is singular; p is not square-free")]
    SingularHermite,
    #[error("every sampled point hit a zero denominator")]
    DegenerateSamples,
    #[error("rationalized certificate failed exact re-verification")]
    RationalizationFailed,
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
