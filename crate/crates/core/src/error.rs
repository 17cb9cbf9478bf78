//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An input is too large for the requested operation.
    #[error("size error: {0}")]
    Size(String),

    /// A persisted file has a bad magic, version, or is truncated.
    #[error("format error: {0}")]
    Format(String),

    /// An operation that needs a nonempty set received an empty one.
    #[error("empty set: {0}")]
    EmptySet(String),

    /// A regression could not be fitted (degenerate or insufficient data).
    #[error("fit error: {0}")]
    Fit(String),

    /// A bead or ledger query ran past the last complete record.
    #[error("incomplete: {0}")]
    Incomplete(String),

    /// No element satisfied the predicate.
    #[error("not found: {0}")]
    NotFound(String),

    /// Two inputs that must agree in shape do not.
    #[error("shape error: {0}")]
    Shape(String),

    /// A half-edge structure is malformed.
    #[error("structure error: {0}")]
    Structure(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
