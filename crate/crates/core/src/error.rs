use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Caller passed data that can never be valid (non-finite features, N < K, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Arguments are individually valid but inconsistent with each other.
    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("cluster {cluster} is empty")]
    EmptyCluster { cluster: usize },

    #[error("relocating sample {sample} would empty cluster {cluster}")]
    WouldEmptyCluster { sample: usize, cluster: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(cond: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ContractViolation(msg()))
    }
}
