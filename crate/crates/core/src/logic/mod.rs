//! Concrete values, ground evaluation and term encoding.

mod eval;
mod json;
mod value;

pub use eval::{eval_expr, eval_in, eval_measure, eval_pred, to_reft, EvalError};
pub use json::{from_json, to_json, JsonError};
pub use value::{CallError, Callable, FunHandle, Value};
