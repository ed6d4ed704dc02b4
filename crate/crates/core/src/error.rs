use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// `I - A` is numerically singular, so the map has no unique fixed point.
    #[error("map {index} is singular: smallest singular value of I - A is {sigma_min:e}")]
    SingularMap { index: usize, sigma_min: f64 },

    #[error("enumeration budget exceeded: {words} words requested, cap is {cap}; try a smaller depth")]
    Budget { words: u128, cap: u64 },

    /// The system has no contraction certificate and no explicit override.
    #[error("refused: {0}")]
    Refused(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
