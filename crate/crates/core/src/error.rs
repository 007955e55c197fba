use thiserror::Error;

/// Errors raised by the boundary toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rank {0}: the rank must satisfy 2 <= d <= 26")]
    InvalidRank(usize),

    #[error("letter with generator index {index} is out of range for rank {rank}")]
    InvalidLetter { index: usize, rank: usize },

    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("operation requires a nonempty word")]
    EmptyWord,

    #[error("the period of a boundary point must be a nonempty word")]
    EmptyPeriod,

    #[error("word is not freely reduced: letters {position} and {} cancel", position + 1)]
    NotReduced { position: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("cannot refine from depth {current} down to depth {requested}")]
    DepthBelow { current: usize, requested: usize },

    #[error("depth {requested} exceeds the configured depth cap {cap}")]
    DepthCap { requested: usize, cap: usize },

    #[error("index {index} out of range for depth {depth}")]
    IndexOutOfRange { index: usize, depth: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid relation: {0}")]
    InvalidRelation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "kernel of eta at depth {depth} is not the lattice of constant tuples \
         (rank {rank}, constants spanning: {constants})"
    )]
    UnverifiedKernel { depth: usize, rank: usize, constants: bool },

    #[error("internal consistency error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
