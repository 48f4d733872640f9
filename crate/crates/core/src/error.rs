use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The low-SNR trade-off has no positive finite bandwidth ratio at this power ratio.
    #[error("trade-off diverged at delta_p = {delta_p} (pole at {pole})")]
    Diverged { delta_p: f64, pole: f64 },

    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("constellation file: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
