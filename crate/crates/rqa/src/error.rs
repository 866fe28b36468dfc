use std::path::{Path, PathBuf};

/// Failures of the harness, split by the exit code they map to.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: cannot decode image: {source}", path.display())]
    Image { path: PathBuf, source: image::ImageError },
    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: &Path, message: impl std::fmt::Display) -> Self {
        Error::Parse { path: path.into(), message: message.to_string() }
    }

    pub fn invalid(message: impl std::fmt::Display) -> Self {
        Error::Invalid(message.to_string())
    }

    /// 1 for malformed or inconsistent input, 2 for I/O failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { .. } | Error::Image { .. } => 2,
            Error::Parse { .. } | Error::Invalid(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
