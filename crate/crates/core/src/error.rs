use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("node {node} is isolated (degree 0)")]
    IsolatedNode { node: usize },

    #[error("graph is disconnected")]
    Disconnected,

    #[error("invalid parameter `{name}`: {msg}")]
    InvalidParam { name: &'static str, msg: String },

    #[error("invalid histogram: {0}")]
    InvalidHistogram(String),

    #[error("node index {index} out of range for graph with {n_nodes} nodes")]
    NodeOutOfRange { index: usize, n_nodes: usize },

    #[error("backward called on a tensor that is not tracked by a tape")]
    Untracked,

    #[error("backward requires a 1x1 loss, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },

    #[error("non-finite loss at step {step} (config: {config})")]
    NonFiniteLoss { step: usize, config: String },

    #[error("{0}")]
    Retries(String),

    #[error("input not found: {0}")]
    InputNotFound(String),

    #[error("checkpoint format: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, msg: impl Into<String>) -> Error {
    Error::InvalidParam {
        name,
        msg: msg.into(),
    }
}
