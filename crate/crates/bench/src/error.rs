use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] ixbench_core::Error),
    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),
    #[error("scale {scale} is below the minimum of {min} rows")]
    ScaleTooSmall { scale: u64, min: u64 },
    #[error("cannot parse filter: {0}")]
    Filter(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl BenchError {
    /// Process exit status: 2 for malformed invocations, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Usage(_) | BenchError::Filter(_) | BenchError::UnknownScenario(_) => 2,
            BenchError::Core(ixbench_core::Error::Usage(_)) => 2,
            _ => 1,
        }
    }
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;
