use std::path::Path;

use envcontour_core::Error as CoreError;

/// Failure of a command, split by who has to fix it.
#[derive(Debug, thiserror::Error)]
pub enum AppError {
    /// Bad flags, unreadable files or data the library refuses outright.
    #[error("{0}")]
    Input(String),
    /// A numerical routine failed on otherwise valid input.
    #[error("{0}")]
    Compute(String),
}

impl AppError {
    pub fn exit_code(&self) -> i32 {
        match self {
            AppError::Input(_) => 2,
            AppError::Compute(_) => 1,
        }
    }

    pub fn io(path: &Path, err: impl std::fmt::Display) -> Self {
        AppError::Input(format!("{}: {err}", path.display()))
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::InsufficientData { .. }
            | CoreError::InvalidSeries(_)
            | CoreError::InvalidParameter(_)
            | CoreError::InvalidGrid(_)
            | CoreError::InvalidPolygon(_)
            | CoreError::InsufficientPaths { .. }
            | CoreError::NonPositiveScale { .. } => AppError::Input(e.to_string()),
            _ => AppError::Compute(e.to_string()),
        }
    }
}

pub type AppResult<T> = Result<T, AppError>;
