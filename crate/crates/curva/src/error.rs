use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurvaError {
    /// Input does not satisfy the documented preconditions.
    #[error("validation: {0}")]
    Validation(String),
    /// A series is not known to the order the computation needs.
    #[error("precision: {0}")]
    Precision(String),
    /// The generating-space degree bound did not stabilize.
    #[error("degree bound: {0}")]
    DegreeBound(String),
    /// A built-in oracle disagrees with the general machinery.
    #[error("oracle disagreement: {0}")]
    Oracle(String),
    /// A bounded loop tripped its guard or an internal assertion failed.
    #[error("internal guard: {0}")]
    Internal(String),
}

impl CurvaError {
    /// Process exit code used by the command line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            CurvaError::Precision(_) | CurvaError::DegreeBound(_) => 3,
            CurvaError::Validation(_) => 4,
            CurvaError::Oracle(_) | CurvaError::Internal(_) => 5,
        }
    }

    /// Stable machine-readable tag.
    pub fn code(&self) -> &'static str {
        match self {
            CurvaError::Validation(_) => "validation",
            CurvaError::Precision(_) => "precision",
            CurvaError::DegreeBound(_) => "degree_bound",
            CurvaError::Oracle(_) => "oracle_disagreement",
            CurvaError::Internal(_) => "internal_guard",
        }
    }
}

pub type Result<T> = std::result::Result<T, CurvaError>;
