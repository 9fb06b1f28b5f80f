use thiserror::Error;

/// Errors produced by the library.
///
/// Variants are grouped by the kind of failure so that callers (the CLI in
/// particular) can map them onto exit codes: malformed input, an
/// experimental design that does not fit the requested summary, or a
/// numerical procedure that could not produce an answer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("invalid input: {0}")]
    Input(String),

    #[error("design violation: {0}")]
    Design(String),

    #[error("all hypotheses removed")]
    AllRemoved,

    #[error("empty truncation window")]
    EmptyWindow,

    #[error("non-finite objective: {0}")]
    NonFinite(String),

    #[error("central matching failed: quadratic coefficient {beta2} is not positive")]
    CentralMatchingFailed { beta2: f64 },

    #[error("{0}")]
    Numeric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Short machine-readable tag for the failure.
    pub fn reason(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Parse { .. } => "parse",
            Error::Input(_) => "input",
            Error::Design(_) => "design",
            Error::AllRemoved => "all_removed",
            Error::EmptyWindow => "empty_window",
            Error::NonFinite(_) => "non_finite",
            Error::CentralMatchingFailed { .. } => "central_matching_failed",
            Error::Numeric(_) => "numeric",
            Error::Io(_) => "io",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
