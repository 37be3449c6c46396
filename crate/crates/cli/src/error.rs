use std::path::Path;
use std::process::ExitCode;

/// How a command that ran to completion went.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    /// Some inputs failed and were skipped.
    Partial,
}

impl Outcome {
    pub fn from_failures(failures: usize) -> Self {
        if failures == 0 {
            Outcome::Success
        } else {
            Outcome::Partial
        }
    }

    pub fn exit_code(self) -> ExitCode {
        match self {
            Outcome::Success => ExitCode::SUCCESS,
            Outcome::Partial => ExitCode::from(1),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] usv_core::Error),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// 2 for problems with the invocation itself, 1 otherwise.
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Core(usv_core::Error::Config(_)) => ExitCode::from(2),
            _ => ExitCode::from(1),
        }
    }
}

impl From<usv_core::AnnotationError> for CliError {
    fn from(e: usv_core::AnnotationError) -> Self {
        CliError::Core(e.into())
    }
}

impl From<usv_core::AudioError> for CliError {
    fn from(e: usv_core::AudioError) -> Self {
        CliError::Core(e.into())
    }
}
