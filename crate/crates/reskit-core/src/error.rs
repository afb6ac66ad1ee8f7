use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("internal error: {0}")]
    Internal(String),
    #[error("no generic point found after {0} attempts")]
    Degeneracy(usize),
    #[error("family is not essential: subset {0:?} sums to a polytope of dimension {1}")]
    NonEssential(Vec<usize>, usize),
    #[error("exceptional family: {0}")]
    ExceptionalFamily(String),
    #[error("no partition matrix found: {0}")]
    NoPartitionFound(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
