use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A line of a text input could not be parsed.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    /// Input is well-formed but refers to things that do not exist.
    #[error("structural error: {0}")]
    Structural(String),

    #[error("invalid input: {0}")]
    Validation(String),

    /// An index was built for a different graph than the one supplied.
    #[error("index does not match graph: {0}")]
    StaleIndex(String),

    #[error("index file: {0}")]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}

/// Failures while decoding a `SEPH` index stream.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FormatError {
    #[error("bad magic {0:?}")]
    BadMagic([u8; 4]),
    #[error("unsupported version {0}")]
    UnsupportedVersion(u16),
    #[error("unknown index kind {0}")]
    UnknownKind(u8),
    #[error("expected a {expected} index, found {found}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },
    #[error("checksum mismatch: stored {stored:#010x}, computed {computed:#010x}")]
    Checksum { stored: u32, computed: u32 },
    #[error("truncated: need {needed} bytes, {available} available")]
    Truncated { needed: usize, available: usize },
    #[error("{0} trailing bytes after payload")]
    TrailingBytes(usize),
    #[error("malformed payload: {0}")]
    Malformed(String),
}
