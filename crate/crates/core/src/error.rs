use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("field degree m={0} is outside 1..=16")]
    FieldDegree(u32),

    #[error("value {value} is not an element of GF(2^{m})")]
    NotInField { value: u32, m: u32 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("shape mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: String, found: String },

    #[error("matrix is singular")]
    Singular,

    #[error("invalid topology: {0}")]
    Topology(String),

    #[error("graph contains a cycle")]
    Cyclic,

    #[error(
        "mincut {mincut} does not match source out-degree {out_degree} and sink in-degree {in_degree}"
    )]
    CapacityMismatch {
        mincut: usize,
        out_degree: usize,
        in_degree: usize,
    },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("no MDS coefficient assignment found after {retries} attempts; try a larger m")]
    RetriesExhausted { retries: u32 },

    #[error("guard exceeded: {0}")]
    Guard(String),

    #[error("noise budget {budget} exceeds the {capacity} bits of the targeted packets")]
    BudgetExceedsTargets { budget: u64, capacity: u64 },

    #[error("index {index} out of range (len {len})")]
    OutOfRange { index: usize, len: usize },

    #[error("invalid probability: {0}")]
    Probability(String),

    #[error("outside the valid regime: {0}")]
    Regime(String),

    #[error("empty transfer-matrix family")]
    EmptyFamily,

    #[error("invalid argument: {0}")]
    Invalid(String),

    #[error("malformed file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn shape(expected: impl std::fmt::Display, found: impl std::fmt::Display) -> Self {
        Error::ShapeMismatch {
            expected: expected.to_string(),
            found: found.to_string(),
        }
    }
}
