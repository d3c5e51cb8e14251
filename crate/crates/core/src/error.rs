use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("codebook line {line}: {msg}")]
    Codebook { line: usize, msg: String },

    #[error("row {row}, column {column}: {msg}")]
    Data { row: usize, column: String, msg: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("privacy budget exhausted: requested (\u{3b5}={req_eps}, \u{3b4}={req_delta}) with (\u{3b5}={rem_eps}, \u{3b4}={rem_delta}) remaining")]
    BudgetExhausted {
        req_eps: f64,
        req_delta: f64,
        rem_eps: f64,
        rem_delta: f64,
    },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn degenerate(msg: impl Into<String>) -> Self {
        Error::Degenerate(msg.into())
    }
}
