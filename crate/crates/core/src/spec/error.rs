use std::fmt;

use thiserror::Error;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Pos {
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("{pos}: syntax error: {msg}")]
    Syntax { pos: Pos, msg: String },
    #[error("{pos}: unknown name `{name}`")]
    UnknownName { pos: Pos, name: String },
    #[error("{pos}: `{name}` expects {expected} argument(s), got {got}")]
    Arity {
        pos: Pos,
        name: String,
        expected: usize,
        got: usize,
    },
    #[error("{pos}: non-linear multiplication `{expr}` (one operand must be a literal)")]
    NonLinear { pos: Pos, expr: String },
    #[error("{pos}: measure `{measure}` has no equation for constructor `{ctor}`")]
    MissingEquation {
        pos: Pos,
        measure: String,
        ctor: String,
    },
    #[error("{pos}: sort error: {msg}")]
    Sort { pos: Pos, msg: String },
    #[error("{pos}: {msg}")]
    Invalid { pos: Pos, msg: String },
}

impl SpecError {
    pub fn pos(&self) -> Pos {
        match self {
            SpecError::Syntax { pos, .. }
            | SpecError::UnknownName { pos, .. }
            | SpecError::Arity { pos, .. }
            | SpecError::NonLinear { pos, .. }
            | SpecError::MissingEquation { pos, .. }
            | SpecError::Sort { pos, .. }
            | SpecError::Invalid { pos, .. } => *pos,
        }
    }
}

/// Errors of the type-manipulation operations on resolved refinement types.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TypeOpError {
    #[error("cannot substitute for the binder `{0}` itself")]
    SubstBinder(String),
    #[error("constructor `{ctor}` does not belong to datatype `{data}`")]
    ForeignCtor { ctor: String, data: String },
    #[error("`{0}` is not a datatype sort")]
    NotData(String),
    #[error("unknown datatype `{0}`")]
    UnknownData(String),
}
