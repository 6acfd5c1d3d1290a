use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),

    #[error("dimension mismatch for {what}: expected {expected}, found {found}")]
    Dimension { what: &'static str, expected: usize, found: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64, last: Vec<f64> },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    ConfigRanges(Vec<String>),

    #[error("analysis error: {0}")]
    Analysis(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { path: path.into(), message: message.into() }
    }
}
