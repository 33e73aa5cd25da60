use thiserror::Error;

use crate::algebra::Family;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero in the cyclotomic field")]
    DivisionByZero,

    #[error("algebra mismatch: {left} vs {right}")]
    SpecMismatch { left: String, right: String },

    #[error("`{op}` is not supported for family {family}")]
    UnsupportedFamily { op: &'static str, family: Family },

    #[error("invalid label `{label}` for {family}")]
    InvalidLabel { label: String, family: Family },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid representation: {0}")]
    InvalidRepresentation(String),

    #[error("decomposition failed: {0}")]
    DecompositionFailure(String),

    #[error("no catalog module has fingerprint {0}")]
    UnknownFingerprint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
