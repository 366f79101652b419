//! The specification language: refinement types, datatypes with refined
//! fields, measures and function specifications.

pub mod ast;
pub mod error;
pub mod lexer;
pub mod ops;
pub mod parser;
mod resolve;

pub use ast::*;
pub use error::{Pos, SpecError, TypeOpError};
pub use resolve::parse_spec;
