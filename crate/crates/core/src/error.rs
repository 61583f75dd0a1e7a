use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degree {degree} exceeds ambient dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("expected {expected} vectors, got {got}")]
    Arity { expected: usize, got: usize },
    #[error("unsupported dimension {0} (must be 1..=12)")]
    UnsupportedDimension(usize),
    #[error("invalid index tuple {0:?}")]
    BadIndex(Vec<usize>),
    #[error("volume form has zero coefficient")]
    ZeroVolume,
    #[error("2-form is not symplectic")]
    NotSymplectic,
    #[error("pair is not elliptic")]
    NotElliptic,
    #[error("pair is not orthogonal (residual {0:e})")]
    NotOrthogonal(f64),
    #[error("linear map is not injective")]
    NotInjective,
    #[error("linear map is not invertible or reverses orientation")]
    NotOrientationPreserving,
    #[error("matrix is not a complex structure (J^2 residual {0:e})")]
    NotComplexStructure(f64),
    #[error("complex structure is not compatible with the orientation")]
    OrientationIncompatible,
    #[error("wedge pairing is not definite on the span")]
    IndefiniteSpan,
    #[error("negative degree parameter")]
    NegativeDegree,
    #[error("degenerate point: {0}")]
    Degenerate(String),
    #[error("rank drop: Jacobian rank {0} < 3")]
    RankDrop(usize),
    #[error("complex-tangent point: dim(T ∩ JT) = {0}")]
    ComplexTangent(usize),
    #[error("vectors are linearly dependent")]
    DependentVectors,
    #[error("flag is not integral")]
    NotIntegral,
    #[error("independence condition fails")]
    IndependenceFails,
    #[error("internal identity failed: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
