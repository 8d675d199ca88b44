//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid-resolution: N = {0}, need N >= {1}")]
    InvalidResolution(usize, usize),

    #[error("grid-too-large: {0} nodes exceeds the cap of {1}")]
    GridTooLarge(u64, u64),

    #[error("invalid cube: {0}")]
    InvalidCube(String),

    #[error("alignment-error: {0}")]
    Alignment(String),

    #[error("domain-error: {0}")]
    Domain(String),

    #[error("too-coarse-for-gradient: N = {0} < 3")]
    TooCoarseForGradient(usize),

    #[error("format-error: {0}")]
    Format(String),

    #[error("data-error: {0}")]
    Data(String),

    #[error("not-a-weight: {0}")]
    NotAWeight(String),

    #[error("invalid-exponent: {0}")]
    InvalidExponent(String),

    #[error("precondition-error: {0}")]
    Precondition(String),

    #[error("dimension-error: {0}")]
    Dimension(String),

    #[error("singular-evaluation: {0}")]
    SingularEvaluation(String),

    #[error("degenerate-pair: x and y coincide (node {0})")]
    DegeneratePair(usize),

    #[error("nothing-to-sweep: no admissible parameter combination")]
    NothingToSweep,

    #[error("{id} requires {requirement}")]
    Hypothesis { id: String, requirement: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn hypothesis(id: &str, requirement: &str) -> Self {
        Error::Hypothesis {
            id: id.to_string(),
            requirement: requirement.to_string(),
        }
    }

    /// True for errors caused by bad user input or violated hypotheses
    /// (CLI exit code 2); the rest are numerical/runtime failures (exit 3).
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidResolution(..)
                | Error::GridTooLarge(..)
                | Error::InvalidCube(..)
                | Error::Alignment(..)
                | Error::Domain(..)
                | Error::TooCoarseForGradient(..)
                | Error::Format(..)
                | Error::InvalidExponent(..)
                | Error::Precondition(..)
                | Error::Dimension(..)
                | Error::NothingToSweep
                | Error::Hypothesis { .. }
                | Error::Parse(..)
        )
    }
}
