use thiserror::Error;

use crate::matrix::Rect;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rectangles {0} and {1} overlap")]
    Overlap(Rect, Rect),

    #[error("index out of bounds: {0}")]
    Bounds(String),

    #[error("malformed contraction sequence: {0}")]
    MalformedSequence(String),

    #[error("invalid matrix order {0}: must be a power of two")]
    InvalidN(usize),

    #[error("cover maintainer is fully covered")]
    Empty,

    #[error("cover contract violated: {0}")]
    ContractViolation(String),

    #[error("construction invariant violated: {0}")]
    ConstructionInvariant(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn bounds(msg: impl Into<String>) -> Error {
    Error::Bounds(msg.into())
}
