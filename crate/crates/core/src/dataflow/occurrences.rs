use serde::Serialize;

use crate::cfg::{BlockId, EdgeId, MpiCfg, Section};
use crate::classify::Op;
use crate::frontend::ProcessId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum OccurrenceKind {
    Def,
    CUse,
    /// Predicate use attributed to one outgoing branch edge.
    PUse {
        edge: EdgeId,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Occurrence {
    pub var: String,
    pub line: usize,
    pub block: BlockId,
    pub kind: OccurrenceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Scope {
    Global,
    Local(ProcessId),
}

impl From<Section> for Scope {
    fn from(section: Section) -> Self {
        match section {
            Section::Global => Scope::Global,
            Section::Process(p) => Scope::Local(p),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Definition {
    pub var: String,
    pub line: usize,
    pub block: BlockId,
    pub scope: Scope,
}

/// Records every def, c-use and p-use in the graph, block by block in
/// statement order. Within one statement the uses come before the def.
pub fn collect_occurrences(cfg: &MpiCfg) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for block in &cfg.blocks {
        let mut push = |var: &str, line: usize, kind: OccurrenceKind| {
            out.push(Occurrence {
                var: var.to_string(),
                line,
                block: block.id,
                kind,
            })
        };
        for stmt in &block.stmts {
            let line = stmt.line;
            match &stmt.op {
                Op::Assign { target, value } => {
                    for v in value.vars() {
                        push(v, line, OccurrenceKind::CUse);
                    }
                    push(target, line, OccurrenceKind::Def);
                }
                Op::If(cond) => {
                    let branch_edges: Vec<EdgeId> = cfg
                        .out_edges(block.id)
                        .filter(|(_, e)| e.branch.is_some())
                        .map(|(id, _)| id)
                        .collect();
                    for v in cond.vars() {
                        for &edge in &branch_edges {
                            push(v, line, OccurrenceKind::PUse { edge });
                        }
                    }
                }
                Op::Send { var, .. } => push(var, line, OccurrenceKind::CUse),
                Op::Recv { var, .. } | Op::Rank(var) | Op::Size(var) => push(var, line, OccurrenceKind::Def),
                Op::Init | Op::Finalize | Op::End | Op::Else | Op::EndIf => {}
            }
        }
    }
    out
}

/// Definition table in occurrence order; a `DefId` indexes it.
pub fn definitions(cfg: &MpiCfg, occurrences: &[Occurrence]) -> Vec<Definition> {
    occurrences
        .iter()
        .filter(|o| o.kind == OccurrenceKind::Def)
        .map(|o| Definition {
            var: o.var.clone(),
            line: o.line,
            block: o.block,
            scope: cfg.block(o.block).section.into(),
        })
        .collect()
}
