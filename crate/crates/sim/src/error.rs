use thiserror::Error;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid simulation config: {0}")]
    Config(String),

    #[error(transparent)]
    Model(#[from] corridor_hedge::Error),

    #[error("{censored} of {n} paths reached the horizon cap without exiting")]
    Censoring { censored: usize, n: usize },

    #[error("unknown strategy id {0}")]
    UnknownStrategy(u8),

    #[error("missing plan: {0}")]
    MissingPlan(&'static str),

    #[error("thread pool: {0}")]
    ThreadPool(String),
}

pub type Result<T> = std::result::Result<T, SimError>;
