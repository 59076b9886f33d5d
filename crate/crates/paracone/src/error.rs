//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors reported by cone geometry, checkers and estimators.
///
/// All variants are `Clone` so that the lazily validated mapping corpus can
/// cache a failed validation and return it on every lookup.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported cone representation: {0}")]
    UnsupportedRepresentation(String),

    #[error("estimation failed: {0}")]
    EstimationFailed(String),

    #[error("invalid modulus: {0}")]
    InvalidModulus(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no finite defect constant exists: {0}")]
    NoFiniteConstant(String),

    #[error("domain exit: {0}")]
    DomainExit(String),

    #[error("unknown mapping '{0}'")]
    UnknownMapping(String),

    #[error("evaluator returned a non-finite value at {0:?}")]
    EvaluatorFailure(Vec<f64>),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
