use thiserror::Error;

use crate::logic::{EvalError, JsonError};
use crate::smt::SmtError;
use crate::spec::TypeOpError;

/// Failures of query generation, decoding and checking.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error(transparent)]
    Smt(#[from] SmtError),
    #[error(transparent)]
    TypeOp(#[from] TypeOpError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Json(#[from] JsonError),
    #[error("sort mismatch: {0}")]
    Sort(String),
    #[error("{0}")]
    Unsupported(String),
}
