use crate::abelian::AbelianError;

/// Errors surfaced by the library. Ambiguity is never an error; it is data.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("stem degree {0} is outside the known table and not forced to vanish")]
    StemRangeExceeded(i64),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("class is not characteristic: {0}")]
    NotCharacteristic(String),
    #[error("virtual dimension is not an integer (numerator {0})")]
    NonIntegerDimension(i64),
    #[error("incompatible boundary: {0}")]
    IncompatibleBoundary(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
    #[error("bad embedding: {0}")]
    BadEmbedding(String),
    #[error("no characteristic lift: {0}")]
    NoLift(String),
    #[error("lift is not unique: {0}")]
    NonUnique(String),
    #[error("inconsistent knowledge base: {0}")]
    Inconsistent(String),
    #[error("no extension split applies: {0}")]
    Indeterminate(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
