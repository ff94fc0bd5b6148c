//! Frontend for the mini-language: lexer, recursive descent parser, static
//! validation and a canonical pretty-printer.
//!
//! Programs are plain integer imperative code whose branch predicates are
//! single relational comparisons (`E1 op E2`, no boolean connectives), which
//! is what the branch-distance machinery downstream relies on.

pub mod ast;
pub mod lexer;
pub mod parser;
pub mod pretty;
pub mod token;
pub mod validate;

use thiserror::Error;

pub use ast::{BinOp, Expr, InputDecl, Predicate, Program, RelOp, Stmt};
pub use lexer::{tokenize, LexError, SourceUnit};
pub use parser::{parse_program, parse_source, ParseError};
pub use pretty::{expr_to_string, predicate_to_string, pretty_print};
pub use token::{Pos, Token, TokenKind};
pub use validate::{validate, Diagnostic, DiagnosticKind, ValidationReport};

/// Any frontend failure: lexical or syntactic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LangError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

/// Parse and validate in one step; validation diagnostics are an error here.
pub fn load_program(source: &SourceUnit) -> Result<Program, LoadError> {
    let program = parse_source(source)?;
    let report = validate(&program);
    if report.is_empty() {
        Ok(program)
    } else {
        Err(LoadError::Invalid(report))
    }
}

#[derive(Debug, Error)]
pub enum LoadError {
    #[error(transparent)]
    Lang(#[from] LangError),
    #[error("program failed validation: {}", .0.diagnostics.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; "))]
    Invalid(ValidationReport),
}
