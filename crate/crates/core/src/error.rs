use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An exact computation was asked for beyond its configured size cap.
    #[error("size cap exceeded for {what}: {got} > {limit}")]
    SizeCap {
        what: &'static str,
        limit: usize,
        got: usize,
    },

    #[error("gave up after {attempts} attempts: {what}")]
    RetryExhausted { what: &'static str, attempts: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
