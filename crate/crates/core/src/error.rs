use thiserror::Error;

use crate::model::Violation;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GsvError {
    #[error("dimension mismatch: expected {expected} entries, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("strategy chose die {die} but the source has {dice} dice")]
    Strategy { die: usize, dice: usize },

    #[error("source is invalid: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidSource(Vec<Violation>),

    #[error("subset enumeration over {dice} dice exceeds the limit of {limit}")]
    SubsetLimit { dice: usize, limit: usize },

    #[error("source does not satisfy HNK")]
    NotHnk,

    #[error("extractor {extractor} needs a source satisfying NK+")]
    NotNkPlus { extractor: &'static str },

    #[error("epsilon {epsilon} is too large for the constructed witness; retry with a smaller value")]
    EpsilonTooLarge { epsilon: String },

    #[error("output length m = {m} exceeds the limit of {limit}")]
    MLimit { m: usize, limit: usize },

    #[error("game tree with {faces}^{n} leaves exceeds the guard of {guard}")]
    TreeLimit { faces: usize, n: usize, guard: u128 },

    #[error("strategy enumeration needs {count} trees, above the guard of {guard}")]
    EnumLimit { count: String, guard: u128 },

    #[error("no die satisfies the greedy inequality after history {history:?}")]
    NoQualifyingDie { history: Vec<usize> },

    #[error("operation needs {expected} outputs")]
    OutputKind { expected: &'static str },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, GsvError>;
