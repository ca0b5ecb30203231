use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("cells per vertex are not uniform")]
    NonRegular,
    #[error("magic sum {numerator}/{denominator} is not an integer")]
    NonIntegral { numerator: u64, denominator: u64 },
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("vertex set is not centrally symmetric: no vertex opposite vertex {0}")]
    NotCentrallySymmetric(usize),
    #[error("vertex {0} has no coordinates")]
    MissingCoordinates(usize),
    #[error("group exceeds cap of {0} elements")]
    CapExceeded(usize),
    #[error("generator {0} does not map the vertex set onto itself")]
    GeneratorNotAutomorphism(usize),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("linear system over GF(2) has no solution")]
    Inconsistent,
    #[error("expected a pool of {expected} balanced labelings, got {actual}")]
    PoolMismatch { expected: usize, actual: usize },
    #[error("digit tuples do not cover all 24 combinations")]
    InvalidSuperimposition,
    #[error("target sum must be positive, got {0}")]
    BadTargetSum(i64),
    #[error("structure {name:?} is not the 24-cell: {reason}")]
    WrongStructure { name: String, reason: String },
    #[error("malformed structure: {0}")]
    MalformedStructure(String),
    #[error("bad search configuration: {0}")]
    BadConfig(String),
    #[error("checkpoint does not match this search: {0}")]
    BadCheckpoint(String),
}

pub type Result<T> = std::result::Result<T, Error>;
