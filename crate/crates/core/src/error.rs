use thiserror::Error;

/// Errors produced by word access, block search, and the verifiers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index arithmetic overflows 64 bits ({context})")]
    IndexOverflow { context: &'static str },

    #[error("requested {requested} {what}, above the configured limit of {limit}")]
    ResourceLimit {
        what: &'static str,
        requested: u64,
        limit: u64,
    },

    #[error("base must be at least 2, got {0}")]
    InvalidBase(u64),

    #[error("block length must be odd and positive, got {0}")]
    EvenBlockLength(u64),

    #[error("k = {k} does not divide the word length {len}")]
    NotDivisible { len: u64, k: u64 },

    #[error("blocks have different lengths ({left} vs {right})")]
    MismatchedBlockLength { left: u64, right: u64 },

    #[error("block ordinals are 1-indexed, got 0")]
    ZeroOrdinal,

    #[error(
        "no repeated block for n = {n} within the first {cap} blocks ({scanned} blocks scanned)"
    )]
    CapExceeded { n: u64, cap: u64, scanned: u64 },

    #[error("infeasible parameters: {0}")]
    Infeasible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("writing output failed: {0}")]
    Output(String),
}

pub type Result<T> = std::result::Result<T, Error>;
