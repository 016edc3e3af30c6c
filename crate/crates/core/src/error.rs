use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("invalid coloring spec: {0}")]
    InvalidSpec(String),

    #[error("invalid generator parameters: {0}")]
    InvalidParams(String),

    #[error("enumeration of {count} colorings exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("oracle guard violated: {0}")]
    OracleGuard(String),

    #[error("unsupported encoding: {0}")]
    Unsupported(String),

    #[error("malformed model: {0}")]
    MalformedModel(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("solver configuration: {0}")]
    SolverConfig(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}
