use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QhError {
    #[error("unsupported shape: {0}")]
    UnsupportedShape(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("invalid quasi-homogeneous type ({t1}, {t2}): both weights must be positive")]
    InvalidType { t1: i64, t2: i64 },
    #[error("zero polynomial where a nonzero one is required: {0}")]
    ZeroPolynomial(String),
    #[error("decomposition undefined: the conservative part of the leading term vanishes")]
    DecompositionUndefined,
    #[error("linear part is not nilpotent and nonzero")]
    NotNilpotent,
    #[error("non-isolated singularity: y = 0 is a curve of singular points up to degree {truncation}")]
    NonIsolated { truncation: u32 },
    #[error("undecided at truncation: classification loop exceeded {iterations} iterations")]
    UndecidedAtTruncation { iterations: u32 },
    #[error("small divisor at k = {k}: the block is singular, |d| = 1 + 2(n+1)/k = {condition} for n = {n}")]
    SmallDivisor { k: i64, n: i64, condition: String },
    #[error("invalid complement: {0}")]
    InvalidComplement(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("truncation {truncation} is too small, need at least {minimum}")]
    TruncationTooSmall { truncation: i64, minimum: i64 },
    #[error("roots lie outside Q(i): {0}")]
    UnsupportedRootField(String),
    #[error("parse error at {line}:{column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("undeclared identifier `{name}` at {line}:{column}")]
    UndeclaredIdentifier { name: String, line: usize, column: usize },
    #[error("unassigned parameter `{0}`")]
    UnassignedParameter(String),
}

pub type Result<T> = std::result::Result<T, QhError>;
