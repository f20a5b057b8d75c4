//! Syntax tree for `.mmpi` programs.

use std::fmt;

use serde::Serialize;

/// Static process rank as written in `send ... to N` / `recv ... from N`.
pub type ProcessId = u32;

/// Message tag; omitted tags default to 0.
pub type Tag = u32;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Ast {
    pub statements: Vec<Stmt>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stmt {
    pub line: usize,
    pub kind: StmtKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StmtKind {
    Assign {
        target: String,
        value: Expr,
    },
    If {
        cond: Comparison,
        then_branch: Vec<Stmt>,
        /// `(line of the else keyword, statements)`
        else_branch: Option<(usize, Vec<Stmt>)>,
        endif_line: usize,
    },
    Init,
    Rank(String),
    Size(String),
    Send {
        var: String,
        dest: ProcessId,
        tag: Option<Tag>,
    },
    Recv {
        var: String,
        source: Source,
        tag: Option<Tag>,
    },
    Finalize,
    End,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum Source {
    Process(ProcessId),
    Any,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Process(p) => write!(f, "{p}"),
            Source::Any => f.write_str("any"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn precedence(self) -> u8 {
        match self {
            BinOp::Add | BinOp::Sub => 1,
            BinOp::Mul | BinOp::Div => 2,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            BinOp::Add => "+",
            BinOp::Sub => "-",
            BinOp::Mul => "*",
            BinOp::Div => "/",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Int(u64),
    Var { name: String, line: usize },
    Binary { op: BinOp, lhs: Box<Expr>, rhs: Box<Expr> },
}

impl Expr {
    /// Identifiers in left-to-right order, duplicates included.
    pub fn vars(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var { name, .. } => out.push(name),
            Expr::Binary { lhs, rhs, .. } => {
                lhs.collect_vars(out);
                rhs.collect_vars(out);
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Binary { op, .. } => op.precedence(),
            _ => u8::MAX,
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Int(v) => write!(f, "{v}"),
            Expr::Var { name, .. } => f.write_str(name),
            Expr::Binary { op, lhs, rhs } => {
                let prec = op.precedence();
                // Left-associative: the right operand needs parens at equal precedence.
                if lhs.precedence() < prec {
                    write!(f, "({lhs})")?;
                } else {
                    write!(f, "{lhs}")?;
                }
                write!(f, " {} ", op.symbol())?;
                if rhs.precedence() <= prec {
                    write!(f, "({rhs})")
                } else {
                    write!(f, "{rhs}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

impl RelOp {
    pub fn symbol(self) -> &'static str {
        match self {
            RelOp::Eq => "==",
            RelOp::Ne => "!=",
            RelOp::Lt => "<",
            RelOp::Le => "<=",
            RelOp::Gt => ">",
            RelOp::Ge => ">=",
        }
    }

    pub fn from_symbol(s: &str) -> Option<Self> {
        Some(match s {
            "==" => RelOp::Eq,
            "!=" => RelOp::Ne,
            "<" => RelOp::Lt,
            "<=" => RelOp::Le,
            ">" => RelOp::Gt,
            ">=" => RelOp::Ge,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Comparison {
    pub lhs: Expr,
    pub op: RelOp,
    pub rhs: Expr,
}

impl Comparison {
    pub fn vars(&self) -> Vec<&str> {
        let mut out = self.lhs.vars();
        out.extend(self.rhs.vars());
        out
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.vars().into_iter().any(|v| v == name)
    }
}

impl fmt::Display for Comparison {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.op.symbol(), self.rhs)
    }
}

impl Stmt {
    /// Source text of the statement's own line (for `if`, the header only).
    pub fn header(&self) -> String {
        match &self.kind {
            StmtKind::Assign { target, value } => format!("{target} = {value}"),
            StmtKind::If { cond, .. } => format!("if {cond} then"),
            StmtKind::Init => "mpi_init".into(),
            StmtKind::Rank(v) => format!("mpi_comm_rank({v})"),
            StmtKind::Size(v) => format!("mpi_comm_size({v})"),
            StmtKind::Send { var, dest, tag } => match tag {
                Some(t) => format!("send {var} to {dest} tag {t}"),
                None => format!("send {var} to {dest}"),
            },
            StmtKind::Recv { var, source, tag } => match tag {
                Some(t) => format!("recv {var} from {source} tag {t}"),
                None => format!("recv {var} from {source}"),
            },
            StmtKind::Finalize => "mpi_finalize".into(),
            StmtKind::End => "end".into(),
        }
    }

    fn write_indented(&self, f: &mut fmt::Formatter<'_>, depth: usize) -> fmt::Result {
        let pad = "  ".repeat(depth);
        writeln!(f, "{pad}{}", self.header())?;
        if let StmtKind::If {
            then_branch,
            else_branch,
            ..
        } = &self.kind
        {
            for s in then_branch {
                s.write_indented(f, depth + 1)?;
            }
            if let Some((_, stmts)) = else_branch {
                writeln!(f, "{pad}else")?;
                for s in stmts {
                    s.write_indented(f, depth + 1)?;
                }
            }
            writeln!(f, "{pad}endif")?;
        }
        Ok(())
    }
}

impl fmt::Display for Ast {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.statements {
            s.write_indented(f, 0)?;
        }
        Ok(())
    }
}

impl Ast {
    /// Number of statements including nested ones (else/endif markers excluded).
    pub fn len(&self) -> usize {
        fn count(stmts: &[Stmt]) -> usize {
            stmts
                .iter()
                .map(|s| match &s.kind {
                    StmtKind::If {
                        then_branch,
                        else_branch,
                        ..
                    } => 1 + count(then_branch) + else_branch.as_ref().map_or(0, |(_, e)| count(e)),
                    _ => 1,
                })
                .sum()
        }
        count(&self.statements)
    }

    pub fn is_empty(&self) -> bool {
        self.statements.is_empty()
    }
}
