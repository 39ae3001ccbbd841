use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{value} is out of range (upper bound {limit})")]
    OutOfRange { value: u64, limit: u64 },

    #[error("table for limit {limit} needs about {needed} bytes, over the memory cap of {cap} bytes")]
    ResourceLimit { limit: u64, needed: u64, cap: u64 },

    #[error("gap witness needs two distinct primes, both sides use {0}")]
    DistinctPrimeRequired(u64),

    #[error("malformed table dump: {0}")]
    Format(String),

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
