use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A run, instance or policy configuration violates a constraint.
    #[error("configuration error: {0}")]
    Config(String),
    /// A function argument is outside its mathematical domain.
    #[error("input error: {0}")]
    Input(String),
    #[error("analysis error: {0}")]
    Analysis(String),
    #[error("aggregation error: {0}")]
    Aggregation(String),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}
