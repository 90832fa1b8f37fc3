use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed spec: {0}")]
    Malformed(String),
    #[error("non-integer entry in `{field}`")]
    NonInteger { field: &'static str },
    #[error("upper-triangular twist (j={j}, i={i}): twists need i < j")]
    UpperTriangularTwist { j: i64, i: i64 },
    #[error("twist index out of range (j={j}, i={i}) for ell={ell}")]
    IndexOutOfRange { j: i64, i: i64, ell: usize },
    #[error("duplicate twist entry (j={j}, i={i})")]
    DuplicateTwist { j: usize, i: usize },
    #[error("length mismatch: ell={ell} but {got} weights")]
    LengthMismatch { ell: usize, got: usize },
    #[error("chain length must be at least 1")]
    EmptyChain,
    #[error("spec not positive")]
    NotPositive,
    #[error("decomposition singular at ξ_∞ (upper-left entry vanishes)")]
    AtInfinity,
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("parameter budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
