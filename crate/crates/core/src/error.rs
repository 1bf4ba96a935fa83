use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    SingularMatrix,
    #[error("rows are dependent: rank {rank}, expected {expected}")]
    RankDeficient { rank: usize, expected: usize },
    #[error("linear system is inconsistent")]
    Inconsistent,
    #[error("bit vector of odd length {0} cannot encode a Pauli operator")]
    OddLength(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("generators {0} and {1} anticommute")]
    NotAbelian(usize, usize),
    #[error("stabilizer generators are linearly dependent")]
    DependentGenerators,
    #[error("{what}: 2^{log2} exceeds the enumeration limit 2^{limit}")]
    TooLarge {
        what: &'static str,
        log2: usize,
        limit: usize,
    },
    #[error("value out of range: {0}")]
    OutOfRange(String),
    #[error("code is invalid: {0}")]
    InvalidCode(String),
    #[error("classical code has no complement (k = n)")]
    NoComplement,
    #[error("no crossing found for v = {v}: oracle answered {answer} at both ends")]
    NoCrossing { v: String, answer: String },
    #[error("could not collect independent crossings after {0} attempts")]
    Exhausted(usize),
    #[error("constraint system is singular")]
    SingularSystem,
    #[error("component {index} = {value} is not within 1/4 of an integer")]
    RoundingAmbiguous { index: usize, value: String },
    #[error("post-check failed: {0}")]
    PostCheckFailed(String),
}
