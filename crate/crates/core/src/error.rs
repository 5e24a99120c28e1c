use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied value violates a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A state that the calling code is supposed to make unreachable.
    #[error("internal error: {0}")]
    Internal(String),

    /// Both samples have zero variance but different means, so the t
    /// statistic is infinite and no finite test result exists.
    #[error("degenerate t-test: zero variance in both samples with unequal means")]
    InfiniteStatistic,
}

pub type Result<T> = std::result::Result<T, Error>;
