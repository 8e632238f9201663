use alloc::string::String;

use crate::detector::Label;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error(
        "{class} class has numerical rank {rank}, cannot take {requested} principal components"
    )]
    Rank {
        class: Label,
        rank: usize,
        requested: usize,
    },

    #[error("model format: {0}")]
    ModelFormat(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::ModelFormat(msg.into())
    }
}
