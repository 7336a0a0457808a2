use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    /// An identity or bound check failed.
    pub const CHECK_FAILED: i32 = 1;
    /// Malformed flags or configuration.
    pub const USAGE: i32 = 2;
    pub const UNKNOWN_CATALOG: i32 = 3;
    pub const BUDGET_EXCEEDED: i32 = 4;
    /// Classifier precondition violated, including characteristic 2 for
    /// the quadric classifier.
    pub const CLASSIFIER_PRECONDITION: i32 = 5;
    /// Invalid mathematical input: bad field, dimensions, equations.
    pub const INVALID_INPUT: i32 = 6;
    pub const IO: i32 = 7;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] slicelab::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use slicelab::Error as E;
        match self {
            CliError::Core(E::UnknownCatalog(_)) => exit::UNKNOWN_CATALOG,
            CliError::Core(E::BudgetExceeded { .. }) => exit::BUDGET_EXCEEDED,
            CliError::Core(
                E::ClassifierPrecondition(_) | E::CharacteristicTwo | E::NotQuadratic(_),
            ) => exit::CLASSIFIER_PRECONDITION,
            CliError::Core(E::IdentityFailed(_)) => exit::CHECK_FAILED,
            CliError::Core(_) => exit::INVALID_INPUT,
            CliError::Config(_) => exit::USAGE,
            CliError::Io(_) | CliError::Json(_) | CliError::Csv(_) => exit::IO,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
