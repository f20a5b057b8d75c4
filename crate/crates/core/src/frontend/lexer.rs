use thiserror::Error;

use super::SourceProgram;

pub const KEYWORDS: &[&str] = &[
    "if",
    "then",
    "else",
    "endif",
    "send",
    "to",
    "tag",
    "recv",
    "from",
    "any",
    "mpi_init",
    "mpi_comm_rank",
    "mpi_comm_size",
    "mpi_finalize",
    "end",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TokenKind {
    Keyword,
    Identifier,
    Integer,
    Operator,
    Punctuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub lexeme: String,
    pub line: usize,
    pub column: usize,
}

impl Token {
    pub fn is(&self, kind: TokenKind, lexeme: &str) -> bool {
        self.kind == kind && self.lexeme == lexeme
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LexError {
    #[error("line {line}: unexpected character {ch:?} at column {column}")]
    UnexpectedChar { line: usize, column: usize, ch: char },
    #[error("line {line}: integer literal {lexeme} out of range")]
    IntegerOverflow { line: usize, lexeme: String },
}

impl LexError {
    pub fn line(&self) -> usize {
        match self {
            LexError::UnexpectedChar { line, .. } | LexError::IntegerOverflow { line, .. } => *line,
        }
    }
}

pub fn is_keyword(word: &str) -> bool {
    KEYWORDS.contains(&word)
}

/// Splits every line of `source` into tokens. `#` starts a comment running to end of line.
pub fn tokenize(source: &SourceProgram) -> Result<Vec<Token>, LexError> {
    let mut tokens = Vec::new();
    for (idx, text) in source.lines.iter().enumerate() {
        lex_line(text, idx + 1, &mut tokens)?;
    }
    Ok(tokens)
}

fn lex_line(text: &str, line: usize, out: &mut Vec<Token>) -> Result<(), LexError> {
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        let start = i;
        let kind = match c {
            '#' => break,
            c if c.is_whitespace() => {
                i += 1;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if is_keyword(&word) {
                    TokenKind::Keyword
                } else {
                    TokenKind::Identifier
                }
            }
            c if c.is_ascii_digit() => {
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let lexeme: String = chars[start..i].iter().collect();
                if lexeme.parse::<u64>().is_err() {
                    return Err(LexError::IntegerOverflow { line, lexeme });
                }
                TokenKind::Integer
            }
            '=' | '!' | '<' | '>' => {
                i += 1;
                if i < chars.len() && chars[i] == '=' {
                    i += 1;
                } else if c == '!' {
                    return Err(LexError::UnexpectedChar { line, column, ch: c });
                }
                TokenKind::Operator
            }
            '+' | '-' | '*' | '/' => {
                i += 1;
                TokenKind::Operator
            }
            '(' | ')' => {
                i += 1;
                TokenKind::Punctuation
            }
            other => {
                return Err(LexError::UnexpectedChar {
                    line,
                    column,
                    ch: other,
                })
            }
        };
        out.push(Token {
            kind,
            lexeme: chars[start..i].iter().collect(),
            line,
            column,
        });
    }
    Ok(())
}
