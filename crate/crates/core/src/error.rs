use thiserror::Error;

/// Failure modes of the kernel. Variants map one-to-one onto the error
/// categories callers are expected to branch on.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invalid group: invariant `{invariant}` violated ({detail})")]
    InvalidGroup { invariant: String, detail: String },
    #[error("numeric failure: {0}")]
    NumericFailure(String),
    #[error("truncation error: field does not decay at the box boundary ({0})")]
    TruncationError(String),
    #[error("refine needed: error estimate {estimate:e} exceeds target {target:e}")]
    RefineNeeded { estimate: f64, target: f64 },
    #[error("chart degenerate: {0}")]
    ChartDegenerate(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("precondition violated: {0}")]
    PreconditionViolation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid_group(invariant: &str, detail: impl Into<String>) -> Self {
        Error::InvalidGroup {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }
}
