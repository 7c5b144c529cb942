use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller violated an operation's precondition.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("memory violation in round {round} on machine {machine}: {words} words exceeds cap of {cap}")]
    MemoryViolation {
        round: usize,
        machine: usize,
        words: u64,
        cap: u64,
    },

    /// Iterative sampling exceeded its safety bound on iterations.
    #[error("sampling stalled: {iterations} iterations without reaching the size guard (|R| = {remaining})")]
    Stall { iterations: usize, remaining: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
