use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by the engine.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// The construction cannot produce a stage that was requested.
    #[error("construction cannot produce stage {stage}: {reason}")]
    SpecIncomplete { stage: usize, reason: String },

    /// A stage record violates the cut/spacer invariants.
    #[error("invalid stage {stage}: {reason}")]
    InvalidStage { stage: usize, reason: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A materialization would exceed the configured cardinality budget.
    #[error("cardinality {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: BigUint, budget: u64 },

    /// A computation contradicted a statement that must hold on every instance.
    #[error("anomaly: {0}")]
    Anomaly(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
