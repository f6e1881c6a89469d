//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by constructors, parsers, and category operations.
#[derive(Debug, Error)]
pub enum Error {
    /// An interval violated nonemptiness or the decoration rules.
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    /// A matching violated partial injectivity or referenced unknown indices.
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    /// A matched pair of intervals fails the overlap-above test.
    #[error("not an overlap matching: {0}")]
    NotOverlap(String),
    /// Composition or comparison of structurally incompatible objects.
    #[error("mismatched objects: {0}")]
    Mismatch(String),
    /// A stratified diagram violated its structural invariants.
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    /// A persistence module or module morphism violated its invariants.
    #[error("invalid module: {0}")]
    InvalidModule(String),
    /// Text input could not be parsed; `line` is 1-based.
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// Attach a 1-based line number to an error raised while parsing a line.
    pub fn at_line(self, line: usize) -> Error {
        match self {
            Error::Parse { line, msg } => Error::Parse { line, msg },
            other => Error::Parse {
                line,
                msg: other.to_string(),
            },
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
