use std::io;

use thiserror::Error;

/// Errors raised by the storage engine, indexes, planner and executor.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid engine or table configuration (page size, fanout, pool size).
    #[error("configuration error: {0}")]
    Config(String),

    /// A row or literal violates a column constraint.
    #[error("validation error: {0}")]
    Validation(String),

    /// A block or row address outside the table.
    #[error("addressing error: {0}")]
    Addressing(String),

    /// Unknown table, column or index.
    #[error("catalog error: {0}")]
    Catalog(String),

    /// API misuse, e.g. combining bitmaps of different lengths.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("planning error: {0}")]
    Planning(String),

    #[error("execution error: {0}")]
    Execution(String),

    /// Malformed on-disk table or metadata file.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
