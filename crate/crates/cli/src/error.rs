use std::fmt;
use std::path::{Path, PathBuf};

/// Process exit codes.
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CONTRACT: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io { path: PathBuf, source: std::io::Error },
    File { path: PathBuf, source: gmkit::Error },
    Lib(gmkit::Error),
    Check(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lib(e) | CliError::File { source: e, .. } if e.is_contract_violation() => EXIT_CONTRACT,
            CliError::Check(_) => EXIT_CONTRACT,
            _ => EXIT_USAGE,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn file(path: &Path, source: gmkit::Error) -> Self {
        CliError::File {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "{msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::File { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Lib(e) => write!(f, "{e}"),
            CliError::Check(msg) => write!(f, "check failed: {msg}"),
        }
    }
}

impl From<gmkit::Error> for CliError {
    fn from(e: gmkit::Error) -> Self {
        CliError::Lib(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
