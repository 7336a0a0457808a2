use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("prime {0} exceeds the supported bound 2^31")]
    PrimeTooLarge(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("field of order {order} exceeds the table limit {limit}")]
    FieldTooLarge { order: u128, limit: u64 },
    #[error("inverse of zero")]
    ZeroInverse,
    #[error("characteristic mismatch: expected p={expected}, got p={got}")]
    FieldMismatch { expected: u32, got: u32 },
    #[error("enumeration of {needed} items exceeds budget {budget}; use sampling instead")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("points must be distinct")]
    CoincidentPoints,
    #[error("invalid dimensions: {0}")]
    InvalidDimension(String),
    #[error("characteristic 2 is not supported for quadratic forms")]
    CharacteristicTwo,
    #[error("expected a polynomial of degree 2, got degree {0}")]
    NotQuadratic(u32),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalog(String),
    #[error("classifier precondition violated: {0}")]
    ClassifierPrecondition(String),
    #[error("deviation threshold undefined for r={r} < k={k}")]
    ThresholdUndefined { r: usize, k: usize },
    #[error("scaling fit: {0}")]
    ScalingFit(String),
    #[error("identity check `{0}` failed")]
    IdentityFailed(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
