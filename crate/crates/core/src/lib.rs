//! Question answering over semi-structured tables with hand-written parsing
//! rules and a learned operand predictor for missing column operands.

pub mod annotate;
pub mod engine;
pub mod error;
pub mod eval;
pub mod executor;
pub mod grammar;
pub mod oracle;
pub mod predictor;
pub mod question_typer;
pub mod scorer;
pub mod table;
pub mod text;

#[cfg(test)]
pub(crate) mod test_support;

pub use error::{Error, Result};
