use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("agent index {agent} out of bounds for {n} agents")]
    AgentOutOfBounds { agent: usize, n: usize },

    #[error("row {row} has {found} entries, expected {expected}")]
    LengthMismatch {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("row index {row} out of bounds for {m} rows")]
    RowOutOfBounds { row: usize, m: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("cannot draw {m} distinct labellings over {n} agents")]
    InfeasibleSample { m: usize, n: usize },

    #[error("{n} agents exceeds the exhaustive-search guard of {max}")]
    TooManyAgents { n: usize, max: usize },

    #[error("row {row} is not an always-changing example")]
    NotAlwaysChanging { row: usize },

    #[error("invalid hitting set instance: {0}")]
    InvalidInstance(String),

    #[error("influencer set does not decode to a hitting set: {0}")]
    NonConforming(String),

    #[error("graph generation failed: {0}")]
    Graph(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
