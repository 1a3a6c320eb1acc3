use thiserror::Error;

use crate::validation::ViolationKind;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma sequence violates its contract at index {index}: {kind}")]
    Gamma { index: usize, kind: ViolationKind },

    #[error("lag structure violates its contract at index {index}: {kind}")]
    Lag { index: usize, kind: ViolationKind },

    #[error("graph weights violate their contract at source {source_index}: {kind}")]
    Graph {
        source_index: usize,
        kind: ViolationKind,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("p-value {value} at index {index} is outside [0, 1]")]
    InvalidPValue { index: usize, value: f64 },

    #[error("level {value} at index {index} is outside [0, 1)")]
    InvalidLevel { index: usize, value: f64 },

    #[error("enumeration over {n} indices exceeds the guard of {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("index {index} is not a member of the index set")]
    NotMember { index: usize },

    #[error("invalid index set: {0}")]
    InvalidIndexSet(String),
}
