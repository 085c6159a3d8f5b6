use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("nonzero diagonal entry at index {index}")]
    DiagonalEntry { index: usize },

    #[error("matrix is not symmetric (max deviation {max_dev:e} exceeds {tol:e})")]
    Asymmetric { max_dev: f64, tol: f64 },

    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("oracle infeasible: {what} has size {size}, cap is {cap}")]
    OracleInfeasible { what: &'static str, size: usize, cap: usize },

    #[error("too large: {what} has size {size}, cap is {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },

    #[error("eigensolver did not converge after {iterations} iterations (eigenvalue index {index}, dimension {dim})")]
    NoConvergence { iterations: usize, index: usize, dim: usize },

    #[error("empty graph")]
    EmptyGraph,

    #[error("no clauses")]
    NoClauses,

    #[error("identity factor singular at u = {u}")]
    IdentitySingular { u: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("malformed hyper-walk: {0}")]
    MalformedWalk(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
