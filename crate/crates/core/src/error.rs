use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(&'static str),

    #[error("not a permutation: {0}")]
    NotAPermutation(&'static str),

    #[error("invalid permutation matrix: {axis} {index} sums to {sum}")]
    InvalidPermutationMatrix {
        axis: &'static str,
        index: usize,
        sum: f64,
    },

    #[error("reference value must be positive, got {0}")]
    NonPositiveReference(f64),

    #[error("random coefficient {0} outside [0, 1]")]
    RandomOutOfRange(f64),

    #[error("invalid PSO coefficients: {0}")]
    InvalidCoefficients(&'static str),

    #[error("second-target depth {depth} must satisfy 1 <= depth < n = {n}")]
    InvalidDepth { depth: usize, n: usize },

    #[error("migration depth {depth} must be below half of {swarms} swarms")]
    MigrationDepth { depth: usize, swarms: usize },

    #[error("swarm {0} has no particles")]
    EmptySwarm(usize),

    #[error("invalid solver configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("cannot allocate population buffers: {bytes} bytes for {particles} particles of size {n}")]
    Allocation { bytes: u64, particles: usize, n: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("invalid histogram range [{lo}, {hi}] with {bins} bins")]
    InvalidRange { lo: f64, hi: f64, bins: usize },

    #[error("percentile rank {0} outside (0, 100)")]
    InvalidRank(f64),
}
