use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] ffqlat_core::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("checkpoint {path}: {msg}")]
    Checkpoint { path: String, msg: String },
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl HarnessError {
    pub fn is_budget(&self) -> bool {
        matches!(self, HarnessError::Core(ffqlat_core::Error::BudgetExceeded { .. }))
    }
}

pub type Result<T, E = HarnessError> = std::result::Result<T, E>;
