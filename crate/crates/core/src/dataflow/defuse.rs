use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::cfg::{BlockId, EdgeId, EdgeKind, MpiCfg};

use super::occurrences::{Definition, Occurrence, OccurrenceKind};
use super::reach::ReachAvail;
use super::DefId;

/// `(definition, line of the use)`
pub type DefUse = (DefId, usize);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DefUseReport {
    pub definitions: Vec<Definition>,
    pub dcu: BTreeMap<BlockId, BTreeSet<DefUse>>,
    pub dpu: BTreeMap<EdgeId, BTreeSet<DefUse>>,
    /// `(definition of a sent variable, line of the receive it reaches)`
    pub comm_pairs: BTreeSet<DefUse>,
    /// Every definition has an entry, possibly empty.
    pub affected: BTreeMap<DefId, BTreeSet<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DataflowError {
    #[error("no definition of `{var}` at line {line}")]
    UnknownDefinition { var: String, line: usize },
}

impl DefUseReport {
    pub fn find(&self, var: &str, line: usize) -> Option<DefId> {
        self.definitions.iter().position(|d| d.var == var && d.line == line)
    }
}

pub fn compute_def_use(cfg: &MpiCfg, occurrences: &[Occurrence], ra: &ReachAvail) -> DefUseReport {
    let defs = &ra.definitions;
    let mut dcu: BTreeMap<BlockId, BTreeSet<DefUse>> = BTreeMap::new();
    let mut dpu: BTreeMap<EdgeId, BTreeSet<DefUse>> = BTreeMap::new();

    for occ in occurrences {
        match occ.kind {
            OccurrenceKind::Def => {}
            OccurrenceKind::CUse => {
                // An earlier definition in the same block hides everything reaching the block.
                let local = defs
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| d.block == occ.block && d.var == occ.var && d.line < occ.line)
                    .max_by_key(|(_, d)| d.line)
                    .map(|(id, _)| id);
                let entry = dcu.entry(occ.block).or_default();
                match local {
                    Some(id) => {
                        entry.insert((id, occ.line));
                    }
                    None => entry.extend(
                        ra.reach[occ.block]
                            .iter()
                            .filter(|&&d| defs[d].var == occ.var)
                            .map(|&d| (d, occ.line)),
                    ),
                }
            }
            OccurrenceKind::PUse { edge } => {
                let entry = dpu.entry(edge).or_default();
                entry.extend(
                    ra.avail[occ.block]
                        .iter()
                        .filter(|&&d| defs[d].var == occ.var)
                        .map(|&d| (d, occ.line)),
                );
            }
        }
    }

    let mut comm_pairs = BTreeSet::new();
    for (_, edge) in cfg.edges_of_kind(EdgeKind::Synchronization) {
        let info = edge.sync.as_ref().expect("synchronization edges carry sync info");
        if let Some(pairs) = dcu.get(&edge.from) {
            for &(d, use_line) in pairs {
                if use_line == info.send_line && defs[d].var == info.var {
                    comm_pairs.insert((d, info.recv_line));
                }
            }
        }
    }

    let mut affected: BTreeMap<DefId, BTreeSet<usize>> = (0..defs.len()).map(|d| (d, BTreeSet::new())).collect();
    for &(d, line) in dcu.values().chain(dpu.values()).flatten().chain(&comm_pairs) {
        affected.entry(d).or_default().insert(line);
    }

    DefUseReport {
        definitions: defs.clone(),
        dcu,
        dpu,
        comm_pairs,
        affected,
    }
}

/// Lines affected by the definition of `var` at `line`, ascending.
pub fn affected_statements(report: &DefUseReport, var: &str, line: usize) -> Result<BTreeSet<usize>, DataflowError> {
    report
        .find(var, line)
        .map(|d| report.affected[&d].clone())
        .ok_or_else(|| DataflowError::UnknownDefinition {
            var: var.to_string(),
            line,
        })
}

/// One line per definition: `def VAR@LINE -> {L1, L2, ...}`, ordered by line then name.
impl fmt::Display for DefUseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut order: Vec<DefId> = (0..self.definitions.len()).collect();
        order.sort_by(|&a, &b| {
            let (da, db) = (&self.definitions[a], &self.definitions[b]);
            (da.line, &da.var).cmp(&(db.line, &db.var))
        });
        for d in order {
            let def = &self.definitions[d];
            let lines: Vec<String> = self.affected[&d].iter().map(usize::to_string).collect();
            writeln!(f, "def {}@{} -> {{{}}}", def.var, def.line, lines.join(", "))?;
        }
        Ok(())
    }
}
