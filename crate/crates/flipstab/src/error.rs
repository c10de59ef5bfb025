use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("not a ray direction")]
    ZeroVector,

    #[error("not simplicial")]
    NotSimplicial,

    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("fan is not complete")]
    NotComplete,

    #[error("cone is not part of the fan")]
    ConeNotInFan,

    #[error("expected {expected} divisors, got {got}")]
    DivisorCount { expected: usize, got: usize },

    #[error("ray index {0} out of range")]
    RayIndex(usize),

    #[error("divisor coefficient at ray {0} is not an integer")]
    NonIntegerCoefficient(usize),

    #[error("sheaf does not live on the expected fan")]
    FanMismatch,

    #[error("invalid filtration: {0}")]
    InvalidFiltration(String),

    #[error("zero subspace not allowed here")]
    ZeroSubspace,

    #[error("candidate set overflow (cap {0})")]
    CandidateOverflow(usize),

    #[error("not a flipping cone ({0})")]
    NotFlippingCone(String),

    #[error("flip datum inconsistent: {0}")]
    FlipStructure(String),

    #[error("polarisation is not ample")]
    NotAmple,

    #[error("polarisation is not Q-Cartier")]
    NotQCartier,

    #[error("no positive epsilon range: {0}")]
    NoPositiveEpsRange(String),

    #[error("{0}")]
    Other(String),
}
