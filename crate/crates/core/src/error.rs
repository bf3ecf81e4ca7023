use std::path::PathBuf;

use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("cannot build a {degree}-regular graph on {n} vertices: {reason}")]
    RegularGraph {
        n: usize,
        degree: usize,
        reason: &'static str,
    },

    #[error("bit string has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },

    #[error("bit string uses the {found} convention but the cost function expects {expected}")]
    ConventionMismatch {
        expected: &'static str,
        found: &'static str,
    },

    #[error("{what} needs {n} qubits/bits, above the cap of {cap}")]
    CapExceeded {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("state has {found} qubits, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid QAOA parameters: {0}")]
    InvalidParams(String),

    #[error("no strings have cost {0}")]
    EmptyIsoCost(i64),

    #[error("edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),

    #[error("{0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
