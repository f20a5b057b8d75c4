//! Def-use analysis on the MPI-CFG.
//!
//! Definitions made before any process section are global and flow into
//! every section; definitions made inside a section stay local to it. Values
//! crossing processes through send/receive are not propagated as
//! definitions. Instead each synchronization edge links the definitions that
//! reach the send to the receiving statement (`comm_pairs`).

mod defuse;
mod occurrences;
mod reach;

pub use defuse::{affected_statements, compute_def_use, DataflowError, DefUse, DefUseReport};
pub use occurrences::{collect_occurrences, definitions, Definition, Occurrence, OccurrenceKind, Scope};
pub use reach::{compute_reach_avail, compute_reach_avail_ordered, FixpointStats, ReachAvail};

use crate::cfg::MpiCfg;

/// Index into a definition table.
pub type DefId = usize;

/// Runs occurrence collection, the reach/avail fixpoint, and def-use pairing.
pub fn analyze_dataflow(cfg: &MpiCfg) -> (ReachAvail, DefUseReport) {
    let occ = collect_occurrences(cfg);
    let ra = compute_reach_avail(cfg, &occ);
    let report = compute_def_use(cfg, &occ, &ra);
    (ra, report)
}
