use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Everything that can go wrong in the engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("invalid context: {0}")]
    InvalidContext(String),

    #[error("apposition requires a common object set (only left: {only_left:?}, only right: {only_right:?})")]
    Apposition {
        only_left: Vec<String>,
        only_right: Vec<String>,
    },

    #[error("attribute `{0}` appears on both sides of an apposition")]
    AttributeCollision(String),

    #[error("scale plan: {0}")]
    Plan(String),

    #[error("facets: {0}")]
    Facet(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("type error: {0}")]
    Type(String),

    #[error("cycle through {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("invalid knowledge system: {0}")]
    Validation(crate::cks::ValidationReport),

    #[error("sharing link: {0}")]
    Link(String),

    #[error("invalid filter: {0}")]
    Filter(String),

    #[error("neighborhoods belong to different sessions")]
    SessionMismatch,

    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },

    #[error("workspace: {0}")]
    Workspace(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn unknown(kind: &'static str, name: impl Into<String>) -> Self {
        Error::Unknown {
            kind,
            name: name.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// A descriptive-name syntax error.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input where parsing failed.
    pub offset: usize,
    pub kind: ParseErrorKind,
    /// Tokens that would have been accepted at `offset`.
    pub expected: Vec<&'static str>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    Unexpected(String),
    UnknownOperator(String),
    UnterminatedString,
    UnterminatedRegex,
    BadRegex(String),
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::Empty => write!(f, "empty query")?,
            ParseErrorKind::Unexpected(tok) if tok.is_empty() => {
                write!(f, "unexpected end of input at byte {}", self.offset)?
            }
            ParseErrorKind::Unexpected(tok) => {
                write!(f, "unexpected `{tok}` at byte {}", self.offset)?
            }
            ParseErrorKind::UnknownOperator(op) => {
                write!(f, "unknown operator `{op}` at byte {}", self.offset)?
            }
            ParseErrorKind::UnterminatedString => {
                write!(f, "unterminated string starting at byte {}", self.offset)?
            }
            ParseErrorKind::UnterminatedRegex => {
                write!(f, "unterminated regex starting at byte {}", self.offset)?
            }
            ParseErrorKind::BadRegex(msg) => {
                write!(f, "invalid regex at byte {}: {msg}", self.offset)?
            }
        }
        if !self.expected.is_empty() {
            write!(f, "; expected one of: {}", self.expected.join(", "))?;
        }
        Ok(())
    }
}
