use std::collections::{BTreeMap, BTreeSet};

use crate::cfg::{BlockId, EdgeKind, MpiCfg};

use super::occurrences::{definitions, Definition, Occurrence, OccurrenceKind, Scope};
use super::DefId;

/// How the round-robin iteration went.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FixpointStats {
    /// Passes over all blocks that changed at least one set.
    pub changing_passes: usize,
    /// Total of |reach(i)| + |avail(i)| over all blocks after each pass, including the final stable one.
    pub cardinalities: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachAvail {
    pub definitions: Vec<Definition>,
    /// Definitions reaching the entry of each block.
    pub reach: Vec<BTreeSet<DefId>>,
    /// Definitions available at the exit of each block.
    pub avail: Vec<BTreeSet<DefId>>,
    pub stats: FixpointStats,
}

impl ReachAvail {
    /// Definitions created in `block` that survive to its exit.
    pub fn generated(&self, block: BlockId) -> BTreeSet<DefId> {
        let mut last: BTreeMap<&str, DefId> = BTreeMap::new();
        for (id, d) in self.definitions.iter().enumerate() {
            if d.block == block {
                last.insert(&d.var, id);
            }
        }
        last.into_values().collect()
    }
}

/// Least fixpoint of the reach/avail equations, visiting blocks in id order.
pub fn compute_reach_avail(cfg: &MpiCfg, occurrences: &[Occurrence]) -> ReachAvail {
    let order: Vec<BlockId> = (0..cfg.blocks.len()).collect();
    compute_reach_avail_ordered(cfg, occurrences, &order)
}

/// Same fixpoint with an explicit visiting order.
///
/// `reach(i)` is the union over incoming edges of the predecessor's `avail`,
/// filtered by edge kind: sequential and fan-in edges pass everything, fan-out
/// edges pass only global definitions, synchronization edges pass nothing.
/// `avail(i) = gen(i) ∪ (reach(i) − kill(i))`.
pub fn compute_reach_avail_ordered(cfg: &MpiCfg, occurrences: &[Occurrence], order: &[BlockId]) -> ReachAvail {
    let defs = definitions(cfg, occurrences);
    let n = cfg.blocks.len();

    let mut gen: Vec<BTreeSet<DefId>> = vec![BTreeSet::new(); n];
    let mut killed_vars: Vec<BTreeSet<&str>> = vec![BTreeSet::new(); n];
    {
        let mut last: Vec<BTreeMap<&str, DefId>> = vec![BTreeMap::new(); n];
        for (id, d) in defs.iter().enumerate() {
            last[d.block].insert(&d.var, id);
            killed_vars[d.block].insert(&d.var);
        }
        for (block, m) in last.into_iter().enumerate() {
            gen[block] = m.into_values().collect();
        }
    }
    debug_assert!(occurrences
        .iter()
        .filter(|o| o.kind == OccurrenceKind::Def)
        .all(|o| o.block < n));

    let preds: Vec<Vec<(BlockId, EdgeKind)>> = (0..n)
        .map(|b| {
            cfg.in_edges(b)
                .filter(|(_, e)| e.kind != EdgeKind::Synchronization)
                .map(|(_, e)| (e.from, e.kind))
                .collect()
        })
        .collect();

    let mut reach: Vec<BTreeSet<DefId>> = vec![BTreeSet::new(); n];
    let mut avail: Vec<BTreeSet<DefId>> = vec![BTreeSet::new(); n];
    let mut stats = FixpointStats::default();

    loop {
        let mut changed = false;
        for &b in order {
            let mut r = BTreeSet::new();
            for &(p, kind) in &preds[b] {
                match kind {
                    EdgeKind::ParallelFanOut => {
                        r.extend(avail[p].iter().copied().filter(|&d| defs[d].scope == Scope::Global))
                    }
                    _ => r.extend(avail[p].iter().copied()),
                }
            }
            let mut a = gen[b].clone();
            a.extend(
                r.iter()
                    .copied()
                    .filter(|&d| !killed_vars[b].contains(defs[d].var.as_str())),
            );
            if r != reach[b] || a != avail[b] {
                reach[b] = r;
                avail[b] = a;
                changed = true;
            }
        }
        stats
            .cardinalities
            .push(reach.iter().chain(avail.iter()).map(BTreeSet::len).sum());
        if !changed {
            break;
        }
        stats.changing_passes += 1;
    }

    ReachAvail {
        definitions: defs,
        reach,
        avail,
        stats,
    }
}
