//! The `.prccsl` specification language.
//!
//! ```text
//! # comment
//! clock cmrTrig
//! def prd50 = periodicon ms period 50
//! rel R1: cmrTrig coincides prd50 prob >= 0.95
//! set samples 1000
//! ```
//!
//! Keywords are case-insensitive; identifiers are not. Clocks, definitions
//! and relation ids share one namespace, names must be introduced before
//! use, and `ms` is always declared.

mod ast;
mod elaborate;
mod lexer;
mod parser;
mod printer;

use std::fmt;

use thiserror::Error;

pub use ast::{Expr, ExprKind, Ident, Setting, Span, SpecFile, Stmt};
pub use elaborate::{elaborate, Elaborated};
pub use lexer::is_keyword;
pub use parser::{parse, parse_syntax, validate};
pub use printer::{pretty_print, print_expr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ErrorKind {
    Lex(String),
    Syntax {
        expected: Vec<String>,
        found: String,
    },
    BadNumber(String),
    ThresholdOutOfRange(String),
    ZeroPeriod,
    ZeroDelay,
    ZeroSamples,
    UnknownName(String),
    NotAClock(String),
    Duplicate(String),
    DuplicateSetting(&'static str),
    Cyclic(String),
}

impl fmt::Display for ErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorKind::Lex(msg) => f.write_str(msg),
            ErrorKind::Syntax { expected, found } => {
                write!(f, "expected {}, found {found}", expected.join(" or "))
            }
            ErrorKind::BadNumber(s) => write!(f, "invalid number {s}"),
            ErrorKind::ThresholdOutOfRange(s) => write!(f, "threshold out of range: {s}"),
            ErrorKind::ZeroPeriod => f.write_str("period must be at least 1"),
            ErrorKind::ZeroDelay => f.write_str("delay must be at least 1"),
            ErrorKind::ZeroSamples => f.write_str("sample size must be at least 1"),
            ErrorKind::UnknownName(n) => write!(f, "unknown name {n}"),
            ErrorKind::NotAClock(n) => write!(f, "{n} is a relation, not a clock"),
            ErrorKind::Duplicate(n) => write!(f, "duplicate name {n}"),
            ErrorKind::DuplicateSetting(s) => write!(f, "duplicate setting {s}"),
            ErrorKind::Cyclic(n) => write!(f, "cyclic definition of {n}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}:{}: {kind}", span.line, span.col)]
pub struct LangError {
    pub kind: ErrorKind,
    pub span: Span,
}

impl LangError {
    pub(crate) fn new(kind: ErrorKind, span: Span) -> Self {
        LangError { kind, span }
    }
}
