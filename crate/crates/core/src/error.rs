use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index error: {0}")]
    Index(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("topology error: {0}")]
    Topology(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),

    #[error("correlation matrix is not positive definite (block values: {blocks})")]
    NotPositiveDefinite { blocks: String },

    #[error("rank error: {scenarios} scenarios cannot match {variables} randomized variables (need at least {})", variables + 1)]
    Rank { scenarios: usize, variables: usize },

    #[error("scenario generation did not converge after {trials} trials (best moment error {moment_error:e}, best correlation error {corr_error:e})")]
    Convergence {
        trials: usize,
        moment_error: f64,
        corr_error: f64,
    },

    #[error("LP solver stalled after {0} pivots")]
    SolverStall(usize),

    #[error("no scenario passed the feasibility check")]
    EmptyResult,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
