use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("unsupported degree {0}: only quadratic fields are computed directly")]
    UnsupportedDegree(u32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("size guard exceeded: {0}")]
    SizeGuard(String),

    #[error("truncation parameter not regular: alpha(T) = {alpha} < {required}")]
    NotRegular { alpha: f64, required: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
