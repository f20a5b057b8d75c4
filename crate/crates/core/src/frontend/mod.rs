//! Lexing and parsing of `.mmpi` source text.
//!
//! The language is line oriented: one statement per line, `#` comments,
//! lowercase reserved keywords. Line numbers assigned here are carried
//! unchanged through every later phase.

mod ast;
mod lexer;
mod parser;

use std::path::Path;

use thiserror::Error;

pub use ast::{Ast, BinOp, Comparison, Expr, ProcessId, RelOp, Source, Stmt, StmtKind, Tag};
pub use lexer::{is_keyword, tokenize, LexError, Token, TokenKind, KEYWORDS};
pub use parser::{parse, ParseError};

/// Raw program text split into 1-based lines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceProgram {
    pub path: String,
    pub lines: Vec<String>,
}

impl SourceProgram {
    /// Accepts LF or CRLF line endings.
    pub fn from_text(path: impl Into<String>, text: &str) -> Self {
        let mut lines: Vec<String> = text
            .split('\n')
            .map(|l| l.strip_suffix('\r').unwrap_or(l).to_string())
            .collect();
        // A trailing newline does not open another line.
        if lines.last().is_some_and(|l| l.is_empty()) {
            lines.pop();
        }
        SourceProgram {
            path: path.into(),
            lines,
        }
    }

    pub fn read(path: impl AsRef<Path>) -> std::io::Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)?;
        Ok(Self::from_text(path.display().to_string(), &text))
    }

    /// 1-based line lookup.
    pub fn line(&self, n: usize) -> Option<&str> {
        n.checked_sub(1).and_then(|i| self.lines.get(i)).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrontendError {
    #[error(transparent)]
    Lex(#[from] LexError),
    #[error(transparent)]
    Parse(#[from] ParseError),
}

impl FrontendError {
    pub fn line(&self) -> usize {
        match self {
            FrontendError::Lex(e) => e.line(),
            FrontendError::Parse(e) => e.line(),
        }
    }
}

pub fn parse_source(source: &SourceProgram) -> Result<Ast, FrontendError> {
    let tokens = tokenize(source)?;
    Ok(parse(&tokens)?)
}
