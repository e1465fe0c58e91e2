use thiserror::Error;

/// Errors produced by graph construction, samplers, oracles and the CLI layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("unknown edge {0}-{1}")]
    UnknownEdge(String, String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("graph too large for enumeration: {0}")]
    TooLarge(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("step budget of {budget} steps exhausted in {context}")]
    StepBudget { budget: u64, context: &'static str },

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("loop {index} has nontrivial holonomy and cannot be lifted")]
    NontrivialHolonomy { index: usize },

    #[error("invalid tree: {0}")]
    InvalidTree(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
