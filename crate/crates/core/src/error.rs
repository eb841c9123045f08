use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gini index is undefined for a population with zero total assets")]
    UndefinedGini,

    #[error("degenerate distribution: {0}")]
    DegenerateDistribution(String),

    #[error("singular fit: {0}")]
    SingularFit(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("cell (lambda={lambda}, gamma={gamma}, replicate={replicate}): {source}")]
    Cell {
        lambda: f64,
        gamma: f64,
        replicate: u32,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
