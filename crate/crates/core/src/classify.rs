//! Statement identification: flattens the syntax tree into numbered,
//! type-tagged statements and records the rank variable (`special_id`).
//!
//! An `if` whose condition mentions the rank variable declares a process
//! section and must have the shape `special_id == N`. Every other `if` is an
//! ordinary branch inside the enclosing region.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::diag::Diagnostic;
use crate::frontend::{Ast, Comparison, Expr, ProcessId, RelOp, Source, Stmt, StmtKind, Tag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum StatementType {
    Assign,
    ParallelIf,
    OrdinaryIf,
    Else,
    EndIf,
    Send,
    Recv,
    Init,
    Rank,
    Size,
    Finalize,
    End,
}

impl StatementType {
    /// Structural markers delimit regions and never land inside a basic block.
    pub fn is_structural(self) -> bool {
        matches!(
            self,
            StatementType::ParallelIf | StatementType::Else | StatementType::EndIf
        )
    }
}

/// Flat, per-line form of a statement; `if` bodies are delimited by `Else`/`EndIf` markers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Op {
    Assign { target: String, value: Expr },
    If(Comparison),
    Else,
    EndIf,
    Init,
    Rank(String),
    Size(String),
    Send { var: String, dest: ProcessId, tag: Tag },
    Recv { var: String, source: Source, tag: Tag },
    Finalize,
    End,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Op::Assign { target, value } => write!(f, "{target} = {value}"),
            Op::If(c) => write!(f, "if {c} then"),
            Op::Else => f.write_str("else"),
            Op::EndIf => f.write_str("endif"),
            Op::Init => f.write_str("mpi_init"),
            Op::Rank(v) => write!(f, "mpi_comm_rank({v})"),
            Op::Size(v) => write!(f, "mpi_comm_size({v})"),
            Op::Send { var, dest, tag } => write!(f, "send {var} to {dest} tag {tag}"),
            Op::Recv { var, source, tag } => write!(f, "recv {var} from {source} tag {tag}"),
            Op::Finalize => f.write_str("mpi_finalize"),
            Op::End => f.write_str("end"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifiedStmt {
    pub line: usize,
    pub ty: StatementType,
    pub op: Op,
    /// Process declared by a `ParallelIf`.
    pub process: Option<ProcessId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ClassifiedProgram {
    pub stmts: Vec<ClassifiedStmt>,
    pub special_id: Option<String>,
    pub size_var: Option<String>,
    pub diagnostics: Vec<Diagnostic>,
}

impl ClassifiedProgram {
    pub fn count(&self, ty: StatementType) -> usize {
        self.stmts.iter().filter(|s| s.ty == ty).count()
    }

    /// Statements that belong in basic blocks.
    pub fn block_statements(&self) -> impl Iterator<Item = &ClassifiedStmt> {
        self.stmts.iter().filter(|s| !s.ty.is_structural())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ClassifyError {
    #[error("line {line}: second mpi_comm_rank (first at line {first})")]
    MultipleRank { line: usize, first: usize },
    #[error("line {line}: process section condition must have the form `{special_id} == N`")]
    NonConstantProcessId { line: usize, special_id: String },
    #[error("line {line}: process section nested inside another conditional")]
    NestedProcessSection { line: usize },
    #[error("line {line}: process section may not have an else branch")]
    ElseOnProcessSection { line: usize },
}

impl ClassifyError {
    pub fn line(&self) -> usize {
        match self {
            ClassifyError::MultipleRank { line, .. }
            | ClassifyError::NonConstantProcessId { line, .. }
            | ClassifyError::NestedProcessSection { line }
            | ClassifyError::ElseOnProcessSection { line } => *line,
        }
    }
}

pub fn classify_statements(ast: &Ast) -> Result<ClassifiedProgram, ClassifyError> {
    let special_id = find_rank(&ast.statements)?;
    let mut cx = Classifier {
        special_id: special_id.as_deref(),
        out: ClassifiedProgram {
            special_id: special_id.clone(),
            ..Default::default()
        },
        seen_init: false,
    };
    cx.walk(&ast.statements, 0)?;
    Ok(cx.out)
}

fn find_rank(stmts: &[Stmt]) -> Result<Option<String>, ClassifyError> {
    fn visit<'a>(stmts: &'a [Stmt], found: &mut Option<(usize, &'a str)>) -> Result<(), ClassifyError> {
        for s in stmts {
            match &s.kind {
                StmtKind::Rank(v) => match found {
                    Some((first, _)) => {
                        return Err(ClassifyError::MultipleRank {
                            line: s.line,
                            first: *first,
                        })
                    }
                    None => *found = Some((s.line, v)),
                },
                StmtKind::If {
                    then_branch,
                    else_branch,
                    ..
                } => {
                    visit(then_branch, found)?;
                    if let Some((_, e)) = else_branch {
                        visit(e, found)?;
                    }
                }
                _ => {}
            }
        }
        Ok(())
    }
    let mut found = None;
    visit(stmts, &mut found)?;
    Ok(found.map(|(_, v)| v.to_string()))
}

struct Classifier<'a> {
    special_id: Option<&'a str>,
    out: ClassifiedProgram,
    seen_init: bool,
}

impl Classifier<'_> {
    fn push(&mut self, line: usize, ty: StatementType, op: Op) {
        self.out.stmts.push(ClassifiedStmt {
            line,
            ty,
            op,
            process: None,
        });
    }

    fn require_init(&mut self, line: usize, what: &str) {
        if !self.seen_init {
            self.out
                .diagnostics
                .push(Diagnostic::warning(line, format!("{what} appears before mpi_init")));
        }
    }

    /// `depth` counts enclosing conditionals of either kind.
    fn walk(&mut self, stmts: &[Stmt], depth: usize) -> Result<(), ClassifyError> {
        for s in stmts {
            let line = s.line;
            match &s.kind {
                StmtKind::Assign { target, value } => self.push(
                    line,
                    StatementType::Assign,
                    Op::Assign {
                        target: target.clone(),
                        value: value.clone(),
                    },
                ),
                StmtKind::If {
                    cond,
                    then_branch,
                    else_branch,
                    endif_line,
                } => {
                    let process = self.process_of(cond, line)?;
                    if process.is_some() {
                        if depth > 0 {
                            return Err(ClassifyError::NestedProcessSection { line });
                        }
                        if else_branch.is_some() {
                            return Err(ClassifyError::ElseOnProcessSection { line });
                        }
                    }
                    let ty = if process.is_some() {
                        StatementType::ParallelIf
                    } else {
                        StatementType::OrdinaryIf
                    };
                    self.out.stmts.push(ClassifiedStmt {
                        line,
                        ty,
                        op: Op::If(cond.clone()),
                        process,
                    });
                    self.walk(then_branch, depth + 1)?;
                    if let Some((else_line, else_stmts)) = else_branch {
                        self.push(*else_line, StatementType::Else, Op::Else);
                        self.walk(else_stmts, depth + 1)?;
                    }
                    self.push(*endif_line, StatementType::EndIf, Op::EndIf);
                }
                StmtKind::Init => {
                    self.seen_init = true;
                    self.push(line, StatementType::Init, Op::Init);
                }
                StmtKind::Rank(v) => {
                    self.require_init(line, "mpi_comm_rank");
                    self.push(line, StatementType::Rank, Op::Rank(v.clone()));
                }
                StmtKind::Size(v) => {
                    self.require_init(line, "mpi_comm_size");
                    if self.out.size_var.is_none() {
                        self.out.size_var = Some(v.clone());
                    }
                    self.push(line, StatementType::Size, Op::Size(v.clone()));
                }
                StmtKind::Send { var, dest, tag } => {
                    self.require_init(line, "send");
                    self.push(
                        line,
                        StatementType::Send,
                        Op::Send {
                            var: var.clone(),
                            dest: *dest,
                            tag: tag.unwrap_or(0),
                        },
                    );
                }
                StmtKind::Recv { var, source, tag } => {
                    self.require_init(line, "recv");
                    self.push(
                        line,
                        StatementType::Recv,
                        Op::Recv {
                            var: var.clone(),
                            source: *source,
                            tag: tag.unwrap_or(0),
                        },
                    );
                }
                StmtKind::Finalize => self.push(line, StatementType::Finalize, Op::Finalize),
                StmtKind::End => self.push(line, StatementType::End, Op::End),
            }
        }
        Ok(())
    }

    /// `Some(k)` for a process-declaring condition `special_id == k`.
    fn process_of(&self, cond: &Comparison, line: usize) -> Result<Option<ProcessId>, ClassifyError> {
        let Some(special) = self.special_id else {
            return Ok(None);
        };
        if !cond.mentions(special) {
            return Ok(None);
        }
        match (&cond.lhs, cond.op, &cond.rhs) {
            (Expr::Var { name, .. }, RelOp::Eq, Expr::Int(k)) if name == special => {
                if let Ok(k) = ProcessId::try_from(*k) {
                    return Ok(Some(k));
                }
            }
            _ => {}
        }
        Err(ClassifyError::NonConstantProcessId {
            line,
            special_id: special.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::frontend::{parse_source, SourceProgram};

    fn classify(text: &str) -> Result<ClassifiedProgram, ClassifyError> {
        let ast = parse_source(&SourceProgram::from_text("t.mmpi", text)).unwrap();
        classify_statements(&ast)
    }

    fn ty_at(cp: &ClassifiedProgram, line: usize) -> StatementType {
        cp.stmts.iter().find(|s| s.line == line).unwrap().ty
    }

    #[test]
    fn rank_records_special_id() {
        let cp = classify("mpi_init\nmpi_comm_rank(myid)\n").unwrap();
        assert_eq!(ty_at(&cp, 2), StatementType::Rank);
        assert_eq!(cp.special_id.as_deref(), Some("myid"));
        assert!(cp.diagnostics.is_empty());
    }

    #[test]
    fn parallel_and_ordinary_ifs() {
        let cp = classify(
            "mpi_init\nmpi_comm_rank(myid)\nif myid == 1 then\n x = 5\n if x < 0 then\n  x = 1\n endif\nendif\n",
        )
        .unwrap();
        assert_eq!(ty_at(&cp, 3), StatementType::ParallelIf);
        assert_eq!(cp.stmts.iter().find(|s| s.line == 3).unwrap().process, Some(1));
        assert_eq!(ty_at(&cp, 5), StatementType::OrdinaryIf);
        assert_eq!(ty_at(&cp, 7), StatementType::EndIf);
        assert_eq!(ty_at(&cp, 8), StatementType::EndIf);
    }

    #[test]
    fn no_rank_means_no_parallel_if() {
        let cp = classify("a = 1\nif a == 0 then\n b = 1\nendif\n").unwrap();
        assert_eq!(ty_at(&cp, 2), StatementType::OrdinaryIf);
        assert_eq!(cp.special_id, None);
    }

    #[test]
    fn rank_after_its_use_still_counts() {
        let cp = classify("if me == 0 then\nendif\nmpi_init\nmpi_comm_rank(me)\n").unwrap();
        assert_eq!(ty_at(&cp, 1), StatementType::ParallelIf);
        assert!(cp.diagnostics.is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(
            classify("mpi_comm_rank(a)\nmpi_comm_rank(b)").unwrap_err(),
            ClassifyError::MultipleRank { line: 2, first: 1 }
        );
        assert!(matches!(
            classify("mpi_comm_rank(me)\nif me < 2 then\nendif").unwrap_err(),
            ClassifyError::NonConstantProcessId { line: 2, .. }
        ));
        assert!(matches!(
            classify("mpi_comm_rank(me)\nif me != 0 then\nendif").unwrap_err(),
            ClassifyError::NonConstantProcessId { line: 2, .. }
        ));
        assert_eq!(
            classify("mpi_comm_rank(me)\nif me == 0 then\n if me == 1 then\n endif\nendif").unwrap_err(),
            ClassifyError::NestedProcessSection { line: 3 }
        );
        assert_eq!(
            classify("mpi_comm_rank(me)\nif a == 0 then\n if me == 1 then\n endif\nendif").unwrap_err(),
            ClassifyError::NestedProcessSection { line: 3 }
        );
        assert_eq!(
            classify("mpi_comm_rank(me)\nif me == 0 then\nelse\nendif").unwrap_err(),
            ClassifyError::ElseOnProcessSection { line: 2 }
        );
    }

    #[test]
    fn communication_before_init_warns() {
        let cp =
            classify("mpi_comm_size(n)\nmpi_init\nmpi_comm_rank(me)\nif me == 0 then\n send a to 1\nendif\n").unwrap();
        assert_eq!(cp.diagnostics.len(), 1);
        assert_eq!(
            cp.diagnostics[0].to_string(),
            "warning line 1: mpi_comm_size appears before mpi_init"
        );
        assert_eq!(cp.size_var.as_deref(), Some("n"));
    }

    #[test]
    fn default_tag_is_zero() {
        let cp = classify("send a to 1\nrecv b from any tag 4").unwrap();
        assert_eq!(
            cp.stmts[0].op,
            Op::Send {
                var: "a".into(),
                dest: 1,
                tag: 0
            }
        );
        assert!(matches!(cp.stmts[1].op, Op::Recv { tag: 4, .. }));
    }
}
