use thiserror::Error;

use crate::poly::MAX_RANK;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),

    #[error("rank {0} is outside the supported range 1..={MAX_RANK}")]
    RankOutOfRange(usize),

    #[error("variable index {index} exceeds rank {rank}")]
    IndexOutOfRange { index: usize, rank: usize },

    #[error("expected a polynomial in the x/y variables only")]
    NotXyPolynomial,

    #[error("expected a monomial in the z/t variables only")]
    NotZtMonomial,

    #[error("parse error at offset {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("unknown group designator {0:?} (expected B<n> or D<n> with 2 <= n <= {MAX_RANK})")]
    UnknownGroup(String),

    #[error("degree {0} must be even")]
    OddDegree(usize),

    #[error("graph has {vertices} vertices but the group has rank {rank}")]
    GraphTooLarge { vertices: usize, rank: usize },

    #[error("index sets of the composed solutions overlap")]
    OverlappingIndices,

    #[error("integer coefficient overflow in expansion")]
    Overflow,

    #[error("internal inconsistency: {0}")]
    Inconsistent(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
