use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("pole: {0}")]
    Pole(String),
    #[error("accuracy: {0}")]
    Accuracy(String),
    #[error("non-finite value: {0}")]
    Evaluation(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("precision budget exhausted at degree {failed_degree}; largest safe n is {max_safe_n}")]
    Precision { max_safe_n: usize, failed_degree: usize },
    #[error("offset {offset} too large: {reason}")]
    OffsetTooLarge { offset: f64, reason: String },
    #[error("sampler envelope failure: {0}")]
    Envelope(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::Parameter(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
