use thiserror::Error;

use crate::algebra::Shape;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape mismatch: {left} vs {right}")]
    ShapeMismatch { left: Shape, right: Shape },

    #[error("block index {index} out of range for shape {shape}")]
    BlockIndex { index: usize, shape: Shape },

    #[error("block {block} is zero: no norm-attaining direction")]
    NoNormAttainingDirection { block: usize },

    #[error("dimension {0} admits no perpendicular unit vector")]
    DimensionTooSmall(usize),

    #[error("zero vector has no perpendicular direction")]
    ZeroVector,

    #[error("witness undefined for zero")]
    WitnessUndefinedForZero,

    #[error("invalid canonical form: {0}")]
    InvalidCanonicalForm(String),

    #[error("invalid factorization: {0}")]
    InvalidFactorization(String),

    #[error("map is not surjective (numerical rank {rank} < {dim})")]
    NotSurjective { rank: usize, dim: usize },

    #[error("degree bound {0} exceeds 12: Vandermonde interpolation is ill-conditioned, use a smaller instance")]
    DegreeTooLarge(usize),

    #[error("degree bound {bound} is below the rank {rank} of the shift element")]
    DegreeBelowRank { bound: usize, rank: usize },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
