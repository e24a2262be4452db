use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid bipolar entry {value} at position {index} (must be -1 or +1)")]
    InvalidBipolar { index: usize, value: i64 },

    #[error("vector must hold at least one entry")]
    EmptyVector,

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("infinite divergence: configuration {index} carries ideal mass but no empirical mass")]
    InfiniteDivergence { index: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("exact enumeration over {n} neurons exceeds the limit of {max}")]
    TooLarge { n: usize, max: usize },

    #[error("weights diverged at step {step}: max |W| = {magnitude}")]
    Diverged { step: usize, magnitude: f64 },

    #[error("empty interval [{start}, {end}] ns")]
    EmptyInterval { start: f64, end: f64 },

    #[error("time {t} ns precedes the first snapshot at {first} ns")]
    BeforeFirstSnapshot { t: f64, first: f64 },

    #[error("{0}")]
    Config(String),

    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error("unsupported snapshot schema version {found} (supported: {supported})")]
    SchemaVersion { found: u32, supported: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.into(),
            reason: reason.into(),
        }
    }
}
