//! Concrete syntax, typechecking and desugaring.
//!
//! Operators from loosest to tightest: `&` (parallel), `+[r]` / `⊕[r]` /
//! `oplus[r]` (choice), `;` (sequence), `~` / `¬` (negation), postfix `*`
//! and `^(n)` (bounded iteration). See [`parser`] for the grammar.

mod ast;
pub mod parser;
mod pretty;
mod typecheck;

mod lexer;

pub use ast::Program;
pub use pretty::pretty;
pub use typecheck::{typecheck, Kind};

use crate::error::{KindError, Result};

/// Parses one program. Errors carry a 1-based line and column.
pub fn parse(text: &str) -> Result<Program> {
    Ok(parser::parse_program(text)?)
}

/// Checks the guards of `if`/`while` and removes the sugar.
pub fn desugar(p: &Program) -> Result<Program, KindError> {
    typecheck(p)?;
    Ok(p.desugar())
}

/// Parses, typechecks and desugars.
pub fn load(text: &str) -> Result<(Program, Kind)> {
    let p = parse(text)?;
    let kind = typecheck(&p)?;
    Ok((p.desugar(), kind))
}
