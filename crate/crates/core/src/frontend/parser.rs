use thiserror::Error;

use super::ast::{Ast, BinOp, Comparison, Expr, RelOp, Source, Stmt, StmtKind};
use super::lexer::{Token, TokenKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("line {line}: expected {expected}, found {found}")]
    Syntax {
        line: usize,
        expected: String,
        found: String,
    },
    #[error("line {line}: `if` has no matching `endif`")]
    UnbalancedIf { line: usize },
}

impl ParseError {
    pub fn line(&self) -> usize {
        match self {
            ParseError::Syntax { line, .. } | ParseError::UnbalancedIf { line } => *line,
        }
    }
}

type Result<T> = std::result::Result<T, ParseError>;

/// Parses a token stream produced by [`super::tokenize`]. One statement per source line.
pub fn parse(tokens: &[Token]) -> Result<Ast> {
    let mut p = Parser { tokens, pos: 0 };
    let statements = p.statements(None)?;
    if let Some(tok) = p.tokens.get(p.pos) {
        return Err(p.unexpected(tok.line, "statement", Some(tok)));
    }
    Ok(Ast { statements })
}

struct Parser<'t> {
    tokens: &'t [Token],
    pos: usize,
}

enum Terminator {
    Else(usize),
    EndIf(usize),
}

impl<'t> Parser<'t> {
    fn peek(&self) -> Option<&'t Token> {
        self.tokens.get(self.pos)
    }

    /// Next token only if it sits on `line`.
    fn peek_on(&self, line: usize) -> Option<&'t Token> {
        self.peek().filter(|t| t.line == line)
    }

    fn bump(&mut self) -> &'t Token {
        let tok = &self.tokens[self.pos];
        self.pos += 1;
        tok
    }

    fn unexpected(&self, line: usize, expected: &str, found: Option<&Token>) -> ParseError {
        ParseError::Syntax {
            line,
            expected: expected.to_string(),
            found: match found {
                Some(t) if t.line == line => format!("`{}`", t.lexeme),
                _ => "end of line".to_string(),
            },
        }
    }

    fn expect(&mut self, line: usize, kind: TokenKind, lexeme: &str) -> Result<()> {
        match self.peek_on(line) {
            Some(t) if t.is(kind, lexeme) => {
                self.bump();
                Ok(())
            }
            other => Err(self.unexpected(line, &format!("`{lexeme}`"), other)),
        }
    }

    fn ident(&mut self, line: usize) -> Result<String> {
        match self.peek_on(line) {
            Some(t) if t.kind == TokenKind::Identifier => Ok(self.bump().lexeme.clone()),
            other => Err(self.unexpected(line, "identifier", other)),
        }
    }

    fn int(&mut self, line: usize) -> Result<u64> {
        match self.peek_on(line) {
            Some(t) if t.kind == TokenKind::Integer => {
                let tok = self.bump();
                // the lexer already rejected literals that do not fit
                Ok(tok.lexeme.parse().expect("validated by lexer"))
            }
            other => Err(self.unexpected(line, "integer", other)),
        }
    }

    fn process_id(&mut self, line: usize) -> Result<u32> {
        let v = self.int(line)?;
        u32::try_from(v).map_err(|_| ParseError::Syntax {
            line,
            expected: "process id below 2^32".into(),
            found: v.to_string(),
        })
    }

    fn end_of_line(&self, line: usize) -> Result<()> {
        match self.peek_on(line) {
            None => Ok(()),
            other => Err(self.unexpected(line, "end of line", other)),
        }
    }

    /// Parses statements until EOF (`enclosing == None`) or an `else`/`endif` line.
    fn statements(&mut self, enclosing: Option<usize>) -> Result<Vec<Stmt>> {
        let mut out = Vec::new();
        while let Some(tok) = self.peek() {
            if tok.kind == TokenKind::Keyword && (tok.lexeme == "else" || tok.lexeme == "endif") {
                if enclosing.is_none() {
                    return Err(self.unexpected(tok.line, "statement", Some(tok)));
                }
                break;
            }
            out.push(self.statement()?);
        }
        Ok(out)
    }

    fn terminator(&mut self, if_line: usize) -> Result<Terminator> {
        let Some(tok) = self.peek() else {
            return Err(ParseError::UnbalancedIf { line: if_line });
        };
        let line = tok.line;
        let term = match tok.lexeme.as_str() {
            "else" => Terminator::Else(line),
            "endif" => Terminator::EndIf(line),
            _ => unreachable!("statements() stops only at else/endif"),
        };
        self.bump();
        self.end_of_line(line)?;
        Ok(term)
    }

    fn statement(&mut self) -> Result<Stmt> {
        let tok = self.peek().expect("caller checked");
        let line = tok.line;
        let kind = match (tok.kind, tok.lexeme.as_str()) {
            (TokenKind::Identifier, _) => {
                let target = self.bump().lexeme.clone();
                self.expect(line, TokenKind::Operator, "=")?;
                let value = self.expr(line)?;
                StmtKind::Assign { target, value }
            }
            (TokenKind::Keyword, "if") => {
                self.bump();
                let cond = self.comparison(line)?;
                self.expect(line, TokenKind::Keyword, "then")?;
                self.end_of_line(line)?;
                let then_branch = self.statements(Some(line))?;
                let (else_branch, endif_line) = match self.terminator(line)? {
                    Terminator::EndIf(l) => (None, l),
                    Terminator::Else(else_line) => {
                        let stmts = self.statements(Some(line))?;
                        match self.terminator(line)? {
                            Terminator::EndIf(l) => (Some((else_line, stmts)), l),
                            Terminator::Else(l) => {
                                return Err(ParseError::Syntax {
                                    line: l,
                                    expected: "`endif`".into(),
                                    found: "`else`".into(),
                                })
                            }
                        }
                    }
                };
                return Ok(Stmt {
                    line,
                    kind: StmtKind::If {
                        cond,
                        then_branch,
                        else_branch,
                        endif_line,
                    },
                });
            }
            (TokenKind::Keyword, "mpi_init") => {
                self.bump();
                StmtKind::Init
            }
            (TokenKind::Keyword, kw @ ("mpi_comm_rank" | "mpi_comm_size")) => {
                self.bump();
                self.expect(line, TokenKind::Punctuation, "(")?;
                let arg = self.ident(line)?;
                self.expect(line, TokenKind::Punctuation, ")")?;
                if kw == "mpi_comm_rank" {
                    StmtKind::Rank(arg)
                } else {
                    StmtKind::Size(arg)
                }
            }
            (TokenKind::Keyword, "send") => {
                self.bump();
                let var = self.ident(line)?;
                self.expect(line, TokenKind::Keyword, "to")?;
                let dest = self.process_id(line)?;
                let tag = self.tag(line)?;
                StmtKind::Send { var, dest, tag }
            }
            (TokenKind::Keyword, "recv") => {
                self.bump();
                let var = self.ident(line)?;
                self.expect(line, TokenKind::Keyword, "from")?;
                let source = match self.peek_on(line) {
                    Some(t) if t.is(TokenKind::Keyword, "any") => {
                        self.bump();
                        Source::Any
                    }
                    _ => Source::Process(self.process_id(line)?),
                };
                let tag = self.tag(line)?;
                StmtKind::Recv { var, source, tag }
            }
            (TokenKind::Keyword, "mpi_finalize") => {
                self.bump();
                StmtKind::Finalize
            }
            (TokenKind::Keyword, "end") => {
                self.bump();
                StmtKind::End
            }
            _ => return Err(self.unexpected(line, "statement", Some(tok))),
        };
        self.end_of_line(line)?;
        Ok(Stmt { line, kind })
    }

    fn tag(&mut self, line: usize) -> Result<Option<u32>> {
        match self.peek_on(line) {
            Some(t) if t.is(TokenKind::Keyword, "tag") => {
                self.bump();
                let v = self.int(line)?;
                u32::try_from(v).map(Some).map_err(|_| ParseError::Syntax {
                    line,
                    expected: "tag below 2^32".into(),
                    found: v.to_string(),
                })
            }
            _ => Ok(None),
        }
    }

    fn comparison(&mut self, line: usize) -> Result<Comparison> {
        let lhs = self.expr(line)?;
        let op = match self.peek_on(line) {
            Some(t) if t.kind == TokenKind::Operator => RelOp::from_symbol(&t.lexeme),
            _ => None,
        };
        let Some(op) = op else {
            return Err(self.unexpected(line, "comparison operator", self.peek_on(line)));
        };
        self.bump();
        let rhs = self.expr(line)?;
        Ok(Comparison { lhs, op, rhs })
    }

    fn expr(&mut self, line: usize) -> Result<Expr> {
        let mut lhs = self.term(line)?;
        while let Some(op) = self.binop(line, &[("+", BinOp::Add), ("-", BinOp::Sub)]) {
            let rhs = self.term(line)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn term(&mut self, line: usize) -> Result<Expr> {
        let mut lhs = self.factor(line)?;
        while let Some(op) = self.binop(line, &[("*", BinOp::Mul), ("/", BinOp::Div)]) {
            let rhs = self.factor(line)?;
            lhs = Expr::Binary {
                op,
                lhs: Box::new(lhs),
                rhs: Box::new(rhs),
            };
        }
        Ok(lhs)
    }

    fn binop(&mut self, line: usize, table: &[(&str, BinOp)]) -> Option<BinOp> {
        let tok = self.peek_on(line)?;
        if tok.kind != TokenKind::Operator {
            return None;
        }
        let op = table.iter().find(|(s, _)| *s == tok.lexeme).map(|(_, op)| *op)?;
        self.bump();
        Some(op)
    }

    fn factor(&mut self, line: usize) -> Result<Expr> {
        match self.peek_on(line) {
            Some(t) if t.kind == TokenKind::Identifier => {
                let name = self.bump().lexeme.clone();
                Ok(Expr::Var { name, line })
            }
            Some(t) if t.kind == TokenKind::Integer => Ok(Expr::Int(self.int(line)?)),
            Some(t) if t.is(TokenKind::Punctuation, "(") => {
                self.bump();
                let e = self.expr(line)?;
                self.expect(line, TokenKind::Punctuation, ")")?;
                Ok(e)
            }
            other => Err(self.unexpected(line, "expression", other)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, SourceProgram};

    fn parse_text(text: &str) -> std::result::Result<Ast, crate::frontend::FrontendError> {
        parse_source(&SourceProgram::from_text("t.mmpi", text))
    }

    #[test]
    fn single_assignment() {
        let ast = parse_text("x = 5").unwrap();
        assert_eq!(ast.statements.len(), 1);
        assert_eq!(ast.statements[0].line, 1);
        assert_eq!(
            ast.statements[0].kind,
            StmtKind::Assign {
                target: "x".into(),
                value: Expr::Int(5)
            }
        );
    }

    #[test]
    fn if_with_both_branches() {
        let ast = parse_text("if x < 0 then\n  x = x + 1\nelse\n  x = x - 1\nendif\n").unwrap();
        let StmtKind::If {
            cond,
            then_branch,
            else_branch,
            endif_line,
        } = &ast.statements[0].kind
        else {
            panic!("expected if");
        };
        assert_eq!(cond.op, RelOp::Lt);
        assert_eq!(then_branch.len(), 1);
        assert_eq!(then_branch[0].line, 2);
        let (else_line, else_stmts) = else_branch.as_ref().unwrap();
        assert_eq!((*else_line, else_stmts.len(), else_stmts[0].line), (3, 1, 4));
        assert_eq!(*endif_line, 5);
    }

    #[test]
    fn missing_endif() {
        let err = parse_text("if myid == 1 then\n x = 1\n").unwrap_err();
        assert_eq!(
            err,
            crate::frontend::FrontendError::Parse(ParseError::UnbalancedIf { line: 1 })
        );
    }

    #[test]
    fn precedence_and_parens() {
        let ast = parse_text("y = a + b * (c - 1)").unwrap();
        let StmtKind::Assign { value, .. } = &ast.statements[0].kind else {
            panic!()
        };
        assert_eq!(value.to_string(), "a + b * (c - 1)");
        assert_eq!(value.vars(), vec!["a", "b", "c"]);
    }

    #[test]
    fn one_statement_per_line() {
        let err = parse_text("x = 1 y = 2").unwrap_err();
        assert!(err.to_string().contains("expected end of line"), "{err}");
        // an expression may not continue onto the next line
        assert!(parse_text("x = 1 +\n2").is_err());
    }

    #[test]
    fn stray_terminators() {
        assert!(parse_text("endif").is_err());
        assert!(parse_text("else").is_err());
        assert!(parse_text("if a == 1 then\nelse\nelse\nendif").is_err());
    }

    #[test]
    fn communication_statements() {
        let ast = parse_text("send x to 0 tag 3\nrecv y from any\nrecv z from 2 tag 1").unwrap();
        assert_eq!(
            ast.statements[0].kind,
            StmtKind::Send {
                var: "x".into(),
                dest: 0,
                tag: Some(3)
            }
        );
        assert_eq!(
            ast.statements[1].kind,
            StmtKind::Recv {
                var: "y".into(),
                source: Source::Any,
                tag: None
            }
        );
        assert_eq!(
            ast.statements[2].kind,
            StmtKind::Recv {
                var: "z".into(),
                source: Source::Process(2),
                tag: Some(1)
            }
        );
        assert!(parse_text("send x to any").is_err());
    }

    #[test]
    fn blank_lines_and_comments_keep_numbering() {
        let ast = parse_text("# header\n\nmpi_init\n\nmpi_comm_rank(me)  # rank\n").unwrap();
        assert_eq!(ast.statements[0].line, 3);
        assert_eq!(ast.statements[1].line, 5);
        assert_eq!(ast.statements[1].kind, StmtKind::Rank("me".into()));
    }
}
