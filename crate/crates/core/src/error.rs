use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid geometry for `{id}`: {reason}")]
    Geometry { id: String, reason: String },

    #[error("invalid timestamp `{value}`: {reason}")]
    Timestamp { value: String, reason: String },

    #[error("no features")]
    NoFeatures,

    #[error("variable sets differ: {0}")]
    VariableMismatch(String),

    #[error("search budget exhausted after {explored} (cap {cap})")]
    BudgetExhausted { explored: u64, cap: u64 },

    #[error("no explanation: {0}")]
    NoExplanation(String),

    #[error("inconsistent: {0}")]
    Inconsistent(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Inconsistent(_) | Error::NoExplanation(_) => 1,
            Error::BudgetExhausted { .. } => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
