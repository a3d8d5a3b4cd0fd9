use std::io;
use std::path::{Path, PathBuf};

use silsamp_core::CodebookError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{0}")]
    Data(String),
    #[error("interrupted in `{question_id}` {condition} after {completed} of {total} respondents; rerun to resume")]
    Interrupted {
        question_id: String,
        condition: silsamp_core::ConditionId,
        completed: usize,
        total: usize,
    },
    #[error("{failed} of {total} records failed in transport, above the allowed fraction {allowed}")]
    PartialFailure { failed: usize, total: usize, allowed: f64 },
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Data(_) => 1,
            CliError::Io { .. } | CliError::Interrupted { .. } => 2,
            CliError::PartialFailure { .. } => 3,
        }
    }

    pub fn io(path: impl AsRef<Path>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.as_ref().to_path_buf();
        move |source| CliError::Io { path, source }
    }
}

impl From<CodebookError> for CliError {
    fn from(e: CodebookError) -> Self {
        match e {
            CodebookError::Io { path, source } => CliError::Io { path, source },
            other => CliError::Data(other.to_string()),
        }
    }
}
