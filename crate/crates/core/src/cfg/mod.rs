//! MPI-aware control-flow graph.
//!
//! Construction runs in three steps:
//! 1. [`build_basic_blocks`] splits the classified statement list into blocks,
//!    opening receive blocks at every `recv`, closing send blocks after every
//!    `send`, and giving `mpi_finalize` a block of its own. Each block records
//!    its control-flow successors.
//! 2. [`generate_edges`] types every successor link by the sections it joins:
//!    global to section is a parallel fan-out, section to global a parallel
//!    fan-in, anything else sequential.
//! 3. [`match_synchronization`] pairs sends with receives and adds
//!    synchronization edges.

mod blocks;
mod dot;
mod edges;

use std::fmt;

use serde::Serialize;

use crate::classify::{ClassifiedProgram, ClassifiedStmt, Op};
use crate::diag::Diagnostic;
use crate::frontend::ProcessId;

pub use blocks::build_basic_blocks;
pub use dot::emit_dot;
pub use edges::{generate_edges, match_synchronization};

pub type BlockId = usize;
pub type EdgeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockKind {
    Entry,
    Exit,
    Ordinary,
    #[serde(rename = "recv")]
    RecvBlock,
    #[serde(rename = "send")]
    SendBlock,
    #[serde(rename = "finalize")]
    FinalizeBlock,
}

impl BlockKind {
    pub fn name(self) -> &'static str {
        match self {
            BlockKind::Entry => "entry",
            BlockKind::Exit => "exit",
            BlockKind::Ordinary => "ordinary",
            BlockKind::RecvBlock => "recv",
            BlockKind::SendBlock => "send",
            BlockKind::FinalizeBlock => "finalize",
        }
    }
}

/// Which processes execute a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Section {
    Global,
    Process(ProcessId),
}

impl Section {
    pub fn process(self) -> Option<ProcessId> {
        match self {
            Section::Global => None,
            Section::Process(p) => Some(p),
        }
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Section::Global => f.write_str("global"),
            Section::Process(p) => write!(f, "process {p}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Then,
    Else,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Then => "then",
            Branch::Else => "else",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Successor {
    pub to: BlockId,
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicBlock {
    pub id: BlockId,
    pub kind: BlockKind,
    pub stmts: Vec<ClassifiedStmt>,
    pub section: Section,
    pub successors: Vec<Successor>,
}

impl BasicBlock {
    pub fn first_line(&self) -> Option<usize> {
        self.stmts.first().map(|s| s.line)
    }

    pub fn last_line(&self) -> Option<usize> {
        self.stmts.last().map(|s| s.line)
    }

    /// The send closing a [`BlockKind::SendBlock`].
    pub fn send(&self) -> Option<&ClassifiedStmt> {
        match self.kind {
            BlockKind::SendBlock => self.stmts.last().filter(|s| matches!(s.op, Op::Send { .. })),
            _ => None,
        }
    }

    /// The receive opening a [`BlockKind::RecvBlock`].
    pub fn recv(&self) -> Option<&ClassifiedStmt> {
        match self.kind {
            BlockKind::RecvBlock => self.stmts.first().filter(|s| matches!(s.op, Op::Recv { .. })),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum EdgeKind {
    Sequential,
    ParallelFanOut,
    ParallelFanIn,
    Synchronization,
}

impl EdgeKind {
    pub fn is_parallel(self) -> bool {
        matches!(self, EdgeKind::ParallelFanOut | EdgeKind::ParallelFanIn)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct SyncInfo {
    pub var: String,
    pub send_line: usize,
    pub recv_line: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: BlockId,
    pub to: BlockId,
    pub kind: EdgeKind,
    pub sync: Option<SyncInfo>,
    /// Set on the two edges leaving an ordinary `if`.
    pub branch: Option<Branch>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MpiCfg {
    pub blocks: Vec<BasicBlock>,
    pub edges: Vec<Edge>,
    pub special_id: Option<String>,
    /// Process ids that own at least one section, ascending.
    pub sections: Vec<ProcessId>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EdgeCounts {
    pub sequential: usize,
    pub parallel: usize,
    pub synchronization: usize,
}

impl MpiCfg {
    pub fn entry(&self) -> BlockId {
        0
    }

    pub fn exit(&self) -> BlockId {
        self.blocks.len() - 1
    }

    pub fn block(&self, id: BlockId) -> &BasicBlock {
        &self.blocks[id]
    }

    pub fn edges_of_kind(&self, kind: EdgeKind) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.kind == kind)
    }

    pub fn out_edges(&self, block: BlockId) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == block)
    }

    pub fn in_edges(&self, block: BlockId) -> impl Iterator<Item = (EdgeId, &Edge)> {
        self.edges.iter().enumerate().filter(move |(_, e)| e.to == block)
    }

    pub fn edge_counts(&self) -> EdgeCounts {
        let mut c = EdgeCounts::default();
        for e in &self.edges {
            match e.kind {
                EdgeKind::Sequential => c.sequential += 1,
                EdgeKind::ParallelFanOut | EdgeKind::ParallelFanIn => c.parallel += 1,
                EdgeKind::Synchronization => c.synchronization += 1,
            }
        }
        c
    }
}

/// Runs all three construction steps.
pub fn build_cfg(program: &ClassifiedProgram) -> (MpiCfg, Vec<Diagnostic>) {
    let blocks = build_basic_blocks(program);
    let (cfg, diagnostics) = generate_edges(blocks, program.special_id.clone());
    (match_synchronization(cfg), diagnostics)
}
