use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where a formula is real or defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A requested trajectory cannot pass through the given geometry.
    #[error("infeasible geometry: {0}")]
    InfeasibleGeometry(String),

    /// Scenario configuration rejected before any computation; `path` names the offending key.
    #[error("invalid config at `{path}`: {message}")]
    Validation { path: String, message: String },

    /// Memory or size cap exceeded; carries the estimate so callers can report it.
    #[error("resource cap exceeded: need {required_bytes} bytes, cap is {cap_bytes} bytes ({detail})")]
    Resource {
        required_bytes: u64,
        cap_bytes: u64,
        detail: String,
    },

    /// Numerical breakdown detected at run time (e.g. wraparound leakage).
    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
