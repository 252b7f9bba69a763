use thiserror::Error;

/// Errors raised by the library.
///
/// Certificate failures and non-convergence are reported as data, not as
/// errors; this type is reserved for malformed input and evaluation faults.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("evaluation of {what} produced a non-finite value at t = {t}, argument = {arg}")]
    Evaluation { what: String, t: f64, arg: f64 },

    #[error("truncation error: {0}")]
    Truncation(String),

    #[error("specification error: {0}")]
    Specification(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("unknown primitive `{kind}` for {slot}")]
    UnknownPrimitive { slot: String, kind: String },

    #[error("missing constants: {}", .0.join(", "))]
    MissingConstants(Vec<String>),

    #[error("constant out of range: {}", .0.join("; "))]
    Range(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
