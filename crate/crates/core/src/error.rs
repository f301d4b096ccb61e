use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("position {t} out of range 1..={n}")]
    PositionOutOfRange { t: usize, n: usize },

    #[error("relative rank {r} out of range 1..={t}")]
    RelativeRankOutOfRange { t: usize, r: usize },

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("non-finite score at position {0}")]
    NonFiniteScore(usize),

    #[error("n = {n} is too large for exhaustive enumeration (max {max})")]
    TooLarge { n: usize, max: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
