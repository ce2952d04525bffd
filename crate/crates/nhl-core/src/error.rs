//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input document or field specification.
    #[error("parse error: {0}")]
    Parse(String),

    /// Input violates a hypothesis a computation needs (arity, antisymmetry, dimension).
    #[error("hypothesis violation: {0}")]
    Hypothesis(String),

    /// A chain space exceeds the configured column cap.
    #[error("memory cap exceeded: {needed} columns needed, cap is {cap}")]
    MemoryCap { needed: usize, cap: usize },

    /// Division by zero in exact arithmetic.
    #[error("division by zero")]
    DivisionByZero,

    /// A vector expected to lie in a span does not.
    #[error("vector is not in the spanned subspace: {0}")]
    NotInSpan(String),

    /// A map expected to preserve a subspace escaped it.
    #[error("subspace not preserved: {0}")]
    SubspaceEscape(String),

    /// A verification that must hold for downstream computations failed.
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
