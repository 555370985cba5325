use thiserror::Error;

use crate::graph::NodeId;

#[derive(Debug, Error)]
pub enum Error {
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("rejected shortcut ({u}, {v}): {reason}")]
    InvalidShortcut { u: NodeId, v: NodeId, reason: String },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("oracle out of budget: {0}")]
    OracleBudget(String),

    #[error("generator failed: {0}")]
    Generator(String),

    #[error("solver failed: {0}")]
    Solver(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
