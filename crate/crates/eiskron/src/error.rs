use num_complex::Complex64;
use thiserror::Error;

/// Errors surfaced by the numerical kernels and the section calculus.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tau = {0} is not in the upper half plane")]
    NotUpperHalf(Complex64),

    #[error("invalid precision settings: {0}")]
    InvalidPrecision(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("evaluation produced a non-finite value at {at}")]
    NonFinite { at: Complex64 },

    #[error("{point} is within {distance:.3e} of the pole divisor {divisor}")]
    PoleProximity {
        point: Complex64,
        distance: f64,
        divisor: String,
    },

    #[error("matrix {0:?} has determinant != 1, not in SL2(Z)")]
    NotSl2([[i64; 2]; 2]),

    #[error("matrix {0:?} is not congruent to the identity mod {1}")]
    NotLevelCongruent([[i64; 2]; 2], i64),

    #[error("section length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("weight check failed for gamma = {gamma:?}: relative error {error:.3e}")]
    WeightCheck { gamma: [[i64; 2]; 2], error: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
