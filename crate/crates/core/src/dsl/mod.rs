//! The safety-rule language: lexer, parser, and the resolver that binds a
//! parsed rule set to a concrete pipeline graph.
//!
//! Grammar:
//!
//! ```text
//! ruleset   := statement* ;
//! statement := (ident "=" expr | expr) ";" ;
//! expr      := comparison ;
//! comparison := additive ((">" | "<" | ">=" | "<=" | "==") additive)* ;
//! additive   := multiplicative (("+" | "-") multiplicative)* ;
//! multiplicative := postfix (("*" | "/") postfix)* ;
//! postfix   := primary ("." ident ("(" args ")")?)* ;
//! primary   := number unit? | ident ("(" args ")")? | "(" expr ")" ;
//! args      := (expr ("," expr)*)? ;
//! ```
//!
//! Identifiers are `[A-Za-z_][A-Za-z0-9_]*`, numbers are decimal literals
//! kept as exact rationals, and the only unit suffix is `p` (pixel domain).
//! `#` starts a comment running to end of line.

mod ast;
mod lexer;
mod parser;
mod resolve;
mod types;

pub use ast::{BinOpKind, Expr, Rational, RuleSet, Span, Statement, Unit};
pub use lexer::{tokenize, LexError, Position, Token, TokenKind};
pub use parser::{parse, ParseError};
pub use resolve::{
    compile, resolve, BuiltinOp, CompiledRule, CompiledRuleSet, NodeId, PlanNode, ResolveError,
};
pub use types::{Dimension, SemanticType};

use thiserror::Error;

/// Any front-end failure: lexing, parsing, or resolution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CompileError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Resolve(#[from] ResolveError),
}
