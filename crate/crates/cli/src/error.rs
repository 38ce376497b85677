use std::path::PathBuf;

use crate::ppm::PpmError;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    BadFlags(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Ppm {
        path: PathBuf,
        #[source]
        source: PpmError,
    },
    #[error(transparent)]
    Core(#[from] mact::Error),
}

impl CliError {
    /// Process exit status: 2 for flags, 3 for input and output, 4 for
    /// numerical failures.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::BadFlags(_) => 2,
            CliError::Io { .. } | CliError::Ppm { .. } => 3,
            CliError::Core(e) => match e {
                mact::Error::Io(_) | mact::Error::MalformedLut(_) => 3,
                mact::Error::UnsupportedGrid(_) | mact::Error::UnknownApproximant { .. } => 2,
                _ => 4,
            },
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> CliError {
        CliError::Io { path: path.into(), source }
    }
}

pub fn bad(msg: impl Into<String>) -> CliError {
    CliError::BadFlags(msg.into())
}
