pub mod spec;
pub mod logic;
pub mod smt;
pub mod check;
pub mod decode;
pub mod error;
pub mod query;

pub use error::EngineError;
pub mod driver;
pub mod builtins;
pub mod corpus;
pub mod bench;
