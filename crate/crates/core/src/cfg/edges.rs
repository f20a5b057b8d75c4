use std::collections::BTreeSet;

use crate::classify::Op;
use crate::diag::Diagnostic;
use crate::frontend::{ProcessId, Source, Tag};

use super::{BasicBlock, BlockId, BlockKind, Edge, EdgeKind, MpiCfg, Section, SyncInfo};

/// Turns block successor links into typed edges.
///
/// Raises a `MissingFinalize` warning when the program uses MPI (an
/// `mpi_init` or any process section) but has no finalize block; the fan-in
/// edges then target whatever block follows the sections, usually Exit.
pub fn generate_edges(blocks: Vec<BasicBlock>, special_id: Option<String>) -> (MpiCfg, Vec<Diagnostic>) {
    let mut edges = Vec::new();
    for block in &blocks {
        for succ in &block.successors {
            let kind = match (block.section, blocks[succ.to].section) {
                (Section::Global, Section::Process(_)) => EdgeKind::ParallelFanOut,
                (Section::Process(_), Section::Global) => EdgeKind::ParallelFanIn,
                (a, b) => {
                    debug_assert_eq!(a, b, "sequential flow never crosses sections");
                    EdgeKind::Sequential
                }
            };
            edges.push(Edge {
                from: block.id,
                to: succ.to,
                kind,
                sync: None,
                branch: succ.branch,
            });
        }
    }

    let sections: Vec<ProcessId> = blocks
        .iter()
        .filter_map(|b| b.section.process())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();

    let mut diagnostics = Vec::new();
    let has_finalize = blocks.iter().any(|b| b.kind == BlockKind::FinalizeBlock);
    let uses_mpi = !sections.is_empty() || blocks.iter().flat_map(|b| &b.stmts).any(|s| s.op == Op::Init);
    if uses_mpi && !has_finalize {
        let last = blocks.iter().filter_map(BasicBlock::last_line).max().unwrap_or(0);
        diagnostics.push(Diagnostic::warning(
            last,
            "mpi_finalize is missing; parallel sections join at the program exit",
        ));
    }

    let cfg = MpiCfg {
        blocks,
        edges,
        special_id,
        sections,
    };
    (cfg, diagnostics)
}

struct Endpoint<'a> {
    block: BlockId,
    process: ProcessId,
    line: usize,
    var: &'a str,
    tag: Tag,
}

/// Adds synchronization edges by rank-ordered pairing.
///
/// For every ordered pair of distinct processes `(s, d)` and every tag, the
/// k-th send in `s` addressed to `d` pairs with the k-th receive in `d` whose
/// source is `s` or `any`. An `any` receive takes part in this pairing once
/// per sending process, so it can collect several incoming edges.
pub fn match_synchronization(mut cfg: MpiCfg) -> MpiCfg {
    let mut sends: Vec<(Endpoint, ProcessId)> = Vec::new();
    let mut recvs: Vec<(Endpoint, Source)> = Vec::new();
    for block in &cfg.blocks {
        let Section::Process(process) = block.section else {
            continue;
        };
        if let Some(stmt) = block.send() {
            if let Op::Send { var, dest, tag } = &stmt.op {
                let ep = Endpoint {
                    block: block.id,
                    process,
                    line: stmt.line,
                    var,
                    tag: *tag,
                };
                sends.push((ep, *dest));
            }
        }
        if let Some(stmt) = block.recv() {
            if let Op::Recv { var, source, tag } = &stmt.op {
                let ep = Endpoint {
                    block: block.id,
                    process,
                    line: stmt.line,
                    var,
                    tag: *tag,
                };
                recvs.push((ep, *source));
            }
        }
    }

    let mut channels: BTreeSet<(ProcessId, ProcessId, Tag)> = BTreeSet::new();
    for (s, dest) in &sends {
        if s.process != *dest {
            channels.insert((s.process, *dest, s.tag));
        }
    }

    let mut sync_edges = Vec::new();
    for (from, to, tag) in channels {
        let outgoing = sends
            .iter()
            .filter(|(s, dest)| s.process == from && *dest == to && s.tag == tag)
            .map(|(s, _)| s);
        let incoming = recvs
            .iter()
            .filter(|(r, source)| {
                r.process == to && r.tag == tag && (*source == Source::Any || *source == Source::Process(from))
            })
            .map(|(r, _)| r);
        for (s, r) in outgoing.zip(incoming) {
            sync_edges.push(Edge {
                from: s.block,
                to: r.block,
                kind: EdgeKind::Synchronization,
                sync: Some(SyncInfo {
                    var: s.var.to_string(),
                    send_line: s.line,
                    recv_line: r.line,
                }),
                branch: None,
            });
        }
    }
    sync_edges.sort_by_key(|e| {
        let info = e.sync.as_ref().expect("sync edge");
        (info.send_line, info.recv_line)
    });
    cfg.edges.extend(sync_edges);
    cfg
}
