use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("unknown item id {0}")]
    UnknownItem(String),
    #[error("unknown edge id {0}")]
    UnknownEdge(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0}")]
    TooLarge(String),
    #[error("search budget of {0} states exceeded")]
    BudgetExceeded(u64),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
