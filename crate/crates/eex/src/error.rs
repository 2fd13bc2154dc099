use std::fmt;
use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

/// Whether an I/O failure happened while producing results or while reading
/// inputs; the two map to different exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IoDirection {
    Read,
    Write,
}

/// Why a command or format operation failed.
#[derive(Debug)]
pub enum Error {
    /// Filesystem access failed.
    Io { path: PathBuf, direction: IoDirection, source: std::io::Error },
    /// A JSON document or JSONL line could not be parsed.
    Json { path: PathBuf, line: Option<usize>, source: serde_json::Error },
    /// A file parsed but violated its schema (bad magic, version, field).
    Format { path: PathBuf, what: String },
    /// A flag or config value was rejected before any work started.
    Usage { what: String },
    /// The core library rejected or aborted the operation.
    Core(eex_core::Error),
}

impl Error {
    pub fn usage(what: impl Into<String>) -> Error {
        Error::Usage { what: what.into() }
    }

    pub fn format(path: impl Into<PathBuf>, what: impl Into<String>) -> Error {
        Error::Format { path: path.into(), what: what.into() }
    }

    pub fn read(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), direction: IoDirection::Read, source }
    }

    pub fn write(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), direction: IoDirection::Write, source }
    }

    /// Process exit code: 2 for anything wrong with the inputs, 3 for
    /// failures that hit after validation (divergence, output I/O).
    pub fn exit_code(&self) -> u8 {
        match self {
            Error::Io { direction: IoDirection::Write, .. } => 3,
            Error::Core(eex_core::Error::NonFiniteLoss { .. }) => 3,
            _ => 2,
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Io { path, direction, source } => {
                let verb = match direction {
                    IoDirection::Read => "reading",
                    IoDirection::Write => "writing",
                };
                write!(f, "{verb} {}: {source}", path.display())
            }
            Error::Json { path, line: Some(line), source } => {
                write!(f, "{}:{line}: {source}", path.display())
            }
            Error::Json { path, line: None, source } => {
                write!(f, "{}: {source}", path.display())
            }
            Error::Format { path, what } => write!(f, "{}: {what}", path.display()),
            Error::Usage { what } => write!(f, "{what}"),
            Error::Core(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io { source, .. } => Some(source),
            Error::Json { source, .. } => Some(source),
            Error::Core(e) => Some(e),
            _ => None,
        }
    }
}

impl From<eex_core::Error> for Error {
    fn from(e: eex_core::Error) -> Error {
        Error::Core(e)
    }
}
