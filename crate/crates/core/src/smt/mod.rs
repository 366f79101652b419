//! SMT-LIB2 solver interface.

pub mod encode;
mod session;
pub mod sexp;
mod solver;

use thiserror::Error;

pub use session::{ty_of_sort, Construction, LogicVar, Model, ModelValue, SatResult, Session, SmtSort};
pub use solver::{Solver, SolverCommand};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SmtError {
    #[error("cannot start solver `{program}`: {reason}")]
    Spawn { program: String, reason: String },
    #[error("solver i/o: {0}")]
    Io(String),
    #[error("solver error: {0}")]
    Solver(String),
    #[error("solver protocol: {0}")]
    Protocol(String),
    #[error("encoding: {0}")]
    Encoding(String),
    #[error("solver timed out")]
    Timeout,
    #[error("solver process is no longer running")]
    Dead,
}
