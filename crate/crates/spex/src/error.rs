use std::fmt;

/// CLI-level error: domain failures from the core, IO with path context,
/// and input parsing.
#[derive(Debug)]
pub enum Error {
    Core(spex_core::Error),
    Io {
        path: String,
        source: std::io::Error,
    },
    Parse(String),
}

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Core(e) if e.is_budget())
    }

    pub fn parse(msg: impl Into<String>) -> Error {
        Error::Parse(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Core(e) => write!(f, "{e}"),
            Error::Io { path, source } => write!(f, "{path}: {source}"),
            Error::Parse(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for Error {}

impl From<spex_core::Error> for Error {
    fn from(e: spex_core::Error) -> Error {
        Error::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, Error>;
