use siginv::ErrorClass;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] siginv::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Format(String),
}

impl CliError {
    /// 2 for bad input, 3 for a numeric guard, 4 for a violated assumption.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) => class_code(e.class()),
            _ => 2,
        }
    }
}

pub fn class_code(class: ErrorClass) -> i32 {
    match class {
        ErrorClass::Input => 2,
        ErrorClass::Numeric => 3,
        ErrorClass::Assumption => 4,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
