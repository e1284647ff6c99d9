use thiserror::Error;

/// Errors produced by graph parsing and the drawing / reduction / solver layers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error, line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge {{{0}, {1}}}")]
    UnknownEdge(String, String),

    #[error("invalid drawing: {0}")]
    InvalidDrawing(String),

    #[error("inconsistent drawings: {0}")]
    Inconsistent(String),

    #[error("graph is not reduced: {0}")]
    NotReduced(String),

    #[error("reduction trace does not match graph: {0}")]
    TraceMismatch(String),

    #[error("lifted drawing failed fan-planarity verification: {0}")]
    LiftFailed(String),

    #[error("invalid DP state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
