//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position {position} out of range for a sequence of length {len}")]
    PositionOutOfRange { position: usize, len: usize },

    #[error("variable index {0} must be a positive odd integer")]
    InvalidVariable(u32),

    #[error("negative index {0} is not allowed here")]
    NegativeIndex(i64),

    #[error("not a strict partition: {0}")]
    InvalidPartition(String),

    #[error("Pfaffian requires an even dimension, got {0}")]
    OddDimension(usize),

    #[error("sequence length has the wrong parity for the requested identity case")]
    ParityMismatch,

    #[error("the even-length identity cases need a nonempty sequence")]
    EmptySequence,

    #[error("invalid soliton parameters: {0}")]
    InvalidSolitonParams(String),

    #[error("tau support stops at t_{found} but the probe needs t_{needed}")]
    InsufficientSupport { needed: u32, found: u32 },
}
