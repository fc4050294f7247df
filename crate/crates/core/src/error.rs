use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dyad ({0}, {1}) is not supported by the ensemble (zero combinatorial weight)")]
    UnsupportedDyad(usize, usize),

    #[error("network has no nodes left")]
    EmptyNetwork,

    #[error("undefined for this input: {0}")]
    Undefined(String),

    #[error("did not converge: {0}")]
    NoConvergence(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
