use thiserror::Error;

/// Errors raised by the simulator library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("node {0} is dead and cannot be charged")]
    DeadNode(usize),

    #[error("seed list is empty")]
    EmptySeeds,

    #[error("no summaries to compare")]
    EmptyComparison,

    #[error("runs were produced from different base configurations")]
    MixedBaseConfig,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidConfig(msg.into())
}
