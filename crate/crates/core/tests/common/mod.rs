#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use mpiflow_core::cfg::{BlockKind, Branch, EdgeId, EdgeKind, MpiCfg, Section};
use mpiflow_core::classify::{ClassifiedProgram, Op};
use mpiflow_core::dataflow::DefUseReport;
use mpiflow_core::{analyze, Analysis, AnalysisOptions, SourceProgram};

pub const CORPUS: &[&str] = &[
    "fig1",
    "clean_pingpong",
    "selfwait",
    "deadlock_missing",
    "deadlock_cycle",
    "unmatched_send",
];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus")
}

pub fn corpus_path(name: &str) -> PathBuf {
    corpus_dir().join(format!("{name}.mmpi"))
}

pub fn load(name: &str) -> SourceProgram {
    SourceProgram::read(corpus_path(name)).unwrap()
}

pub fn analyze_all(src: &SourceProgram) -> Analysis {
    analyze(src, &AnalysisOptions::default()).unwrap_or_else(|e| panic!("{}: {e}", src.path))
}

/// Line number of the `nth` (0-based) line whose trimmed text equals `text`.
pub fn line_of(src: &SourceProgram, text: &str, nth: usize) -> usize {
    src.lines
        .iter()
        .enumerate()
        .filter(|(_, l)| l.trim() == text)
        .nth(nth)
        .map(|(i, _)| i + 1)
        .unwrap_or_else(|| panic!("no occurrence {nth} of `{text}`"))
}

/// `(def var, def line, use line, p-use location)`; the location is
/// `(block holding the predicate, branch)` and `None` marks a c-use.
pub type Pair = (String, usize, usize, Option<(usize, Branch)>);

/// dcu and dpu pairs as reported by the analyzer.
pub fn analyzer_pairs(cfg: &MpiCfg, report: &DefUseReport) -> BTreeSet<Pair> {
    let mut out = BTreeSet::new();
    for set in report.dcu.values() {
        for &(d, use_line) in set {
            let def = &report.definitions[d];
            out.insert((def.var.clone(), def.line, use_line, None));
        }
    }
    for (&edge, set) in &report.dpu {
        let e = &cfg.edges[edge];
        for &(d, use_line) in set {
            let def = &report.definitions[d];
            out.insert((def.var.clone(), def.line, use_line, Some((e.from, e.branch.unwrap()))));
        }
    }
    out
}

fn enumerate_paths(cfg: &MpiCfg, at: usize, path: &mut Vec<EdgeId>, out: &mut Vec<Vec<EdgeId>>) {
    if at == cfg.exit() {
        out.push(path.clone());
        return;
    }
    for (id, e) in cfg.edges.iter().enumerate() {
        if e.from == at && e.kind != EdgeKind::Synchronization {
            path.push(id);
            enumerate_paths(cfg, e.to, path, out);
            path.pop();
        }
    }
}

/// Def-use pairs found by walking every entry-to-exit path statement by statement.
///
/// Along a path, the latest definition of each variable is live; crossing a
/// fan-out edge forgets definitions made inside process sections. Only valid
/// for acyclic graphs.
pub fn oracle_pairs(cfg: &MpiCfg) -> BTreeSet<Pair> {
    let mut paths = Vec::new();
    enumerate_paths(cfg, cfg.entry(), &mut Vec::new(), &mut paths);

    let mut out = BTreeSet::new();
    for path in paths {
        // var -> (def line, made in global code)
        let mut live: BTreeMap<String, (usize, bool)> = BTreeMap::new();
        for edge_id in path {
            let edge = &cfg.edges[edge_id];
            if let Some(branch) = edge.branch {
                let from = cfg.block(edge.from);
                let cond = from.stmts.last().expect("branching block ends with its predicate");
                let Op::If(c) = &cond.op else {
                    panic!("branch edge without predicate")
                };
                for v in c.vars() {
                    if let Some(&(def_line, _)) = live.get(v) {
                        out.insert((v.to_string(), def_line, cond.line, Some((edge.from, branch))));
                    }
                }
            }
            if edge.kind == EdgeKind::ParallelFanOut {
                live.retain(|_, (_, global)| *global);
            }
            let block = cfg.block(edge.to);
            let global = block.section == Section::Global;
            for stmt in &block.stmts {
                let (uses, def): (Vec<&str>, Option<&str>) = match &stmt.op {
                    Op::Assign { target, value } => (value.vars(), Some(target)),
                    Op::Send { var, .. } => (vec![var], None),
                    Op::Recv { var, .. } | Op::Rank(var) | Op::Size(var) => (vec![], Some(var)),
                    _ => (vec![], None),
                };
                for v in uses {
                    if let Some(&(def_line, _)) = live.get(v) {
                        out.insert((v.to_string(), def_line, stmt.line, None));
                    }
                }
                if let Some(v) = def {
                    live.insert(v.to_string(), (stmt.line, global));
                }
            }
        }
    }
    out
}

/// Block partition computed straight from the source text, for cross-checking
/// the block builder. Entry, exit and empty join blocks are not produced.
pub fn text_block_partition(src: &SourceProgram) -> Vec<(&'static str, Vec<usize>)> {
    let rank_var = src
        .lines
        .iter()
        .find_map(|l| {
            let t = l.trim();
            t.strip_prefix("mpi_comm_rank(").and_then(|r| r.strip_suffix(')'))
        })
        .map(str::to_string);
    let mut blocks: Vec<(&'static str, Vec<usize>)> = Vec::new();
    let mut open = false;
    for (i, raw) in src.lines.iter().enumerate() {
        let line = i + 1;
        let t = raw.split('#').next().unwrap().trim();
        if t.is_empty() {
            continue;
        }
        let first = t.split_whitespace().next().unwrap();
        let is_process_if = first == "if"
            && rank_var
                .as_deref()
                .is_some_and(|r| t.split_whitespace().nth(1) == Some(r));
        match first {
            "else" | "endif" => open = false,
            _ if is_process_if => open = false,
            "recv" => {
                blocks.push(("recv", vec![line]));
                open = false;
            }
            "send" => {
                if open {
                    let b = blocks.last_mut().unwrap();
                    b.0 = "send";
                    b.1.push(line);
                } else {
                    blocks.push(("send", vec![line]));
                }
                open = false;
            }
            "mpi_finalize" => {
                blocks.push(("finalize", vec![line]));
                open = true;
            }
            _ => {
                let can_append = open
                    && match blocks.last().unwrap().0 {
                        "ordinary" => true,
                        "finalize" => first == "end",
                        _ => false,
                    };
                if can_append {
                    blocks.last_mut().unwrap().1.push(line);
                } else {
                    blocks.push(("ordinary", vec![line]));
                }
                open = first != "if";
            }
        }
    }
    blocks
}

/// Non-empty, non-entry/exit blocks of the analyzer's graph in the same shape.
pub fn cfg_block_partition(cfg: &MpiCfg) -> Vec<(&'static str, Vec<usize>)> {
    cfg.blocks
        .iter()
        .filter(|b| !b.stmts.is_empty())
        .map(|b| (b.kind.name(), b.stmts.iter().map(|s| s.line).collect()))
        .collect()
}

/// Structural laws every graph must satisfy. Returns the violated ones.
pub fn structural_violations(program: &ClassifiedProgram, cfg: &MpiCfg) -> Vec<String> {
    let mut v = Vec::new();

    // statement partition
    let mut in_blocks: Vec<usize> = cfg.blocks.iter().flat_map(|b| b.stmts.iter().map(|s| s.line)).collect();
    in_blocks.sort_unstable();
    let expected: Vec<usize> = program.block_statements().map(|s| s.line).collect();
    if in_blocks != expected {
        v.push(format!(
            "partition: blocks hold {in_blocks:?}, program has {expected:?}"
        ));
    }

    // entry/exit
    let entries = cfg.blocks.iter().filter(|b| b.kind == BlockKind::Entry).count();
    let exits = cfg.blocks.iter().filter(|b| b.kind == BlockKind::Exit).count();
    if entries != 1
        || exits != 1
        || cfg.blocks[0].kind != BlockKind::Entry
        || cfg.blocks[cfg.exit()].kind != BlockKind::Exit
    {
        v.push("entry/exit placement".into());
    }

    // block kind contents
    for b in &cfg.blocks {
        let comm = b
            .stmts
            .iter()
            .filter(|s| matches!(s.op, Op::Send { .. } | Op::Recv { .. } | Op::Finalize))
            .count();
        let ok = match b.kind {
            BlockKind::Entry | BlockKind::Exit => b.stmts.is_empty(),
            BlockKind::Ordinary => comm == 0,
            BlockKind::RecvBlock => comm == 1 && matches!(b.stmts[0].op, Op::Recv { .. }),
            BlockKind::SendBlock => comm == 1 && matches!(b.stmts.last().unwrap().op, Op::Send { .. }),
            BlockKind::FinalizeBlock => {
                comm == 1 && b.stmts[0].op == Op::Finalize && b.stmts[1..].iter().all(|s| s.op == Op::End)
            }
        };
        if !ok {
            v.push(format!("block B{} content does not fit kind {:?}", b.id, b.kind));
        }
    }

    // edges
    for e in &cfg.edges {
        let (from, to) = (cfg.block(e.from), cfg.block(e.to));
        match e.kind {
            EdgeKind::Synchronization => {
                if e.sync.is_none()
                    || from.kind != BlockKind::SendBlock
                    || to.kind != BlockKind::RecvBlock
                    || from.section == to.section
                {
                    v.push(format!("sync edge B{} -> B{} endpoints", e.from, e.to));
                }
            }
            EdgeKind::Sequential => {
                if e.sync.is_some() || from.section != to.section {
                    v.push(format!("sequential edge B{} -> B{} crosses sections", e.from, e.to));
                }
            }
            EdgeKind::ParallelFanOut => {
                if from.section != Section::Global || to.section == Section::Global {
                    v.push(format!("fan-out B{} -> B{}", e.from, e.to));
                }
            }
            EdgeKind::ParallelFanIn => {
                if from.section == Section::Global || to.section != Section::Global {
                    v.push(format!("fan-in B{} -> B{}", e.from, e.to));
                }
            }
        }
    }

    // reachability over control edges
    let mut seen = vec![false; cfg.blocks.len()];
    let mut stack = vec![cfg.entry()];
    while let Some(b) = stack.pop() {
        if std::mem::replace(&mut seen[b], true) {
            continue;
        }
        for e in &cfg.edges {
            if e.from == b && e.kind != EdgeKind::Synchronization {
                stack.push(e.to);
            }
        }
    }
    if let Some(b) = seen.iter().position(|s| !s) {
        v.push(format!("B{b} unreachable from entry"));
    }

    // each process section connected under sequential edges (undirected)
    for &p in &cfg.sections {
        let members: Vec<usize> = cfg
            .blocks
            .iter()
            .filter(|b| b.section == Section::Process(p))
            .map(|b| b.id)
            .collect();
        let mut reached = BTreeSet::from([members[0]]);
        let mut grew = true;
        while grew {
            grew = false;
            for e in cfg.edges.iter().filter(|e| e.kind == EdgeKind::Sequential) {
                let (a, b) = (reached.contains(&e.from), reached.contains(&e.to));
                if a != b && members.contains(&e.from) && members.contains(&e.to) {
                    reached.insert(e.from);
                    reached.insert(e.to);
                    grew = true;
                }
            }
        }
        if reached.len() != members.len() {
            v.push(format!("process {p} blocks not connected"));
        }
    }
    v
}
