use std::path::PathBuf;

use crate::lp::LpError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("{path}:{line}: duplicate pair ({u}, {v})")]
    DuplicatePair {
        path: PathBuf,
        line: usize,
        u: usize,
        v: usize,
    },
    #[error("{path}:{line}: vertex {vertex} out of range for n={n}")]
    VertexRange {
        path: PathBuf,
        line: usize,
        vertex: usize,
        n: usize,
    },
    #[error("degenerate instance: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error(transparent)]
    Lp(#[from] LpError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
