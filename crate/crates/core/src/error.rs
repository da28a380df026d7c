use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EulerError {
    #[error("{0} is not a prime")]
    NotPrime(u64),

    #[error("alpha = {0} is outside [-1, 1]")]
    AlphaOutOfRange(String),

    #[error("direction vector must be nonzero")]
    ZeroDirection,

    #[error("unknown product family `{0}`")]
    UnknownName(String),

    #[error("syntax error at position {position}: expected {expected}")]
    Syntax { position: usize, expected: String },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("pole hit: factor denominator vanishes for p = {0}")]
    PoleHit(u64),

    #[error("truncation order cap {cap} reached before tail bound fell below {target:e}")]
    TruncationCap { cap: usize, target: f64 },

    #[error("not a distribution: coefficient c({i},{j}) at p = {p} is negative")]
    NotADistribution { p: u64, i: usize, j: usize },

    #[error("Kronecker search exhausted its budget of {0} candidates")]
    BudgetExhausted(usize),

    #[error("measure has negative weight and cannot be sampled")]
    SignedMeasure,

    #[error("sample batch is empty")]
    EmptyBatch,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, EulerError>;
