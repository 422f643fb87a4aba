use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("dimension {0} is outside the supported range 1..={max}", max = crate::MAX_DIM)]
    UnsupportedDimension(usize),

    #[error("vector is identically zero")]
    ZeroVector,

    #[error("state vector is not normalized (squared norm {0})")]
    NotNormalized(f64),

    #[error("at least one term is required")]
    Empty,

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("malformed matrix: {0}")]
    Malformed(String),

    #[error("projector {index} is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { index: usize, deviation: f64 },

    #[error("projector {index} is not idempotent (deviation {deviation:.3e})")]
    NotIdempotent { index: usize, deviation: f64 },

    #[error("projectors {first} and {second} are not orthogonal (deviation {deviation:.3e})")]
    NotOrthogonal {
        first: usize,
        second: usize,
        deviation: f64,
    },

    #[error("projectors do not sum to the identity (deviation {deviation:.3e})")]
    NotComplete { deviation: f64 },

    #[error("basis is not orthonormal at ({first}, {second}) (deviation {deviation:.3e})")]
    NotOrthonormal {
        first: usize,
        second: usize,
        deviation: f64,
    },

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid number of outcomes {outcomes} for dimension {dim}")]
    InvalidOutcomeCount { dim: usize, outcomes: usize },

    #[error("the two-state vector forms no story with the measurement")]
    NotAStory,

    #[error("the two-state vector forms no story with measurement {0}")]
    NotAStoryWith(usize),

    #[error("no component of the mixture forms a story with the measurement")]
    NoStoryInMixture,

    #[error("invalid mixture: {0}")]
    InvalidMixture(String),

    #[error("no story witness found (internal error)")]
    NoWitness,

    #[error("numerical kernel dimension {found} differs from the expected {expected}")]
    KernelDimension { expected: usize, found: usize },

    #[error("constraint system does not have the three-level two-outcome shape: {0}")]
    ShapeMismatch(String),

    #[error("input two-state vector is separable")]
    SeparableInput,

    #[error("no post-selection successes were recorded")]
    NoSuccesses,

    #[error(
        "outcome {outcome} expects only {expected:.1} successes; at least {required} are needed"
    )]
    InsufficientTrials {
        outcome: usize,
        expected: f64,
        required: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("workspace error: {0}")]
    Workspace(String),
}
