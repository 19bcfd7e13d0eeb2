use thiserror::Error;

/// Errors surfaced by graph construction, statistics, tuning and I/O.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty graph")]
    EmptyGraph,

    #[error("assortativity undefined: all edge-end degrees are equal")]
    AssortativityUndefined,

    #[error("correlation undefined: {0}")]
    CorrelationUndefined(&'static str),

    #[error("degenerate activation: {0}")]
    DegenerateActivation(String),

    #[error("degree sequence has odd sum ({0})")]
    OddDegreeSum(u64),

    #[error("degree {0} not observed in this graph")]
    UnobservedDegree(u32),

    #[error("threshold must lie strictly between 0 and 1, got {0}")]
    InvalidThreshold(f64),

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown format: {0}")]
    UnknownFormat(String),

    #[error("unknown node label {0} in assignment")]
    UnknownLabel(u64),

    #[error("assignment covers {got} of {expected} nodes")]
    IncompleteAssignment { got: usize, expected: usize },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("toml error: {0}")]
    Toml(#[from] toml::de::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
