use thiserror::Error;

/// Errors produced by the numeric kernel, state validation and the checkers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension must be at least 1")]
    EmptyMatrix,

    #[error("expected {expected} entries for a {dim}x{dim} matrix, got {got}")]
    Shape {
        dim: usize,
        expected: usize,
        got: usize,
    },

    #[error("matrix contains a non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("dimension {dim} exceeds the configured maximum {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("split {dim_a}x{dim_b} does not match matrix dimension {dim}")]
    SplitMismatch {
        dim: usize,
        dim_a: usize,
        dim_b: usize,
    },

    #[error("matrix is not Hermitian (max |m - m†| = {max_deviation:.3e})")]
    NotHermitian { max_deviation: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("trace is {trace} (deviation from 1 is {deviation:.3e})")]
    Trace { trace: f64, deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },

    #[error("rank {rank} out of range 1..={dim}")]
    RankOutOfRange { rank: usize, dim: usize },

    #[error("state vector is not normalized (norm {norm})")]
    NotNormalized { norm: f64 },

    #[error("pure state carries no bipartite split")]
    MissingSplit,

    #[error("invalid probability vector: {0}")]
    Probability(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("invalid ensemble: {0}")]
    Ensemble(String),

    #[error("invalid projective measurement: {0}")]
    Measurement(String),

    #[error("matrix {index} of the unitary mixture is not unitary (deviation {deviation:.3e})")]
    NotUnitary { index: usize, deviation: f64 },

    #[error("Tsallis index must be positive and different from 1, got {0}")]
    TsallisIndex(f64),

    #[error("Weyl mixture needs b >= 2, got {0}")]
    WeylDimension(usize),

    #[error("entropy evaluated to {0:e}, below the round-off allowance")]
    NegativeEntropy(f64),

    #[error("invalid check configuration: {0}")]
    Config(String),
}

impl Error {
    /// True for errors that reject a matrix as a quantum state or operation
    /// (as opposed to malformed requests or solver failures).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::NotHermitian { .. }
                | Error::Trace { .. }
                | Error::NotPositive { .. }
                | Error::NotNormalized { .. }
                | Error::NonFinite { .. }
                | Error::Probability(_)
                | Error::Measurement(_)
                | Error::NotUnitary { .. }
                | Error::DimensionMismatch { .. }
                | Error::SplitMismatch { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
