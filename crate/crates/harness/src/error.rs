use thiserror::Error;

/// Harness failures, each tied to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("runtime failure: {0}")]
    Runtime(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// 1 for configuration errors, 2 for runtime and i/o failures, 3 for
    /// failed verification.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 1,
            Self::Runtime(_) | Self::Io { .. } => 2,
            Self::Verification(_) => 3,
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Self::Io { path: path.display().to_string(), source }
    }
}

impl From<riskaverse::Error> for HarnessError {
    fn from(e: riskaverse::Error) -> Self {
        Self::Runtime(e.to_string())
    }
}

pub type HarnessResult<T> = std::result::Result<T, HarnessError>;
