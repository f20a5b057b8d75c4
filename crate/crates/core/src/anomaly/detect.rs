use std::collections::{BTreeSet, VecDeque};

use serde::Serialize;

use crate::frontend::{ProcessId, Source};

use super::records::{SendRecord, WaitRecord};

/// Candidate partners for every wait and every send.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchTable {
    pub waits: Vec<WaitRecord>,
    pub sends: Vec<SendRecord>,
    /// Indices into `sends`, per wait.
    pub wait_candidates: Vec<Vec<usize>>,
    /// Indices into `waits`, per send.
    pub send_candidates: Vec<Vec<usize>>,
}

/// Envelope match: destination, source (or `any`) and tag. Payload names are ignored.
pub fn can_match(wait: &WaitRecord, send: &SendRecord) -> bool {
    send.dest == wait.process
        && match wait.partner {
            Source::Any => true,
            Source::Process(p) => p == send.process,
        }
        && send.tag == wait.tag
}

pub fn match_records(waits: Vec<WaitRecord>, sends: Vec<SendRecord>) -> MatchTable {
    let wait_candidates = waits
        .iter()
        .map(|w| (0..sends.len()).filter(|&s| can_match(w, &sends[s])).collect())
        .collect();
    let send_candidates = sends
        .iter()
        .map(|s| (0..waits.len()).filter(|&w| can_match(&waits[w], s)).collect())
        .collect();
    MatchTable {
        waits,
        sends,
        wait_candidates,
        send_candidates,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum DeadlockCause {
    /// No send anywhere can satisfy the wait.
    MissingSend,
    /// Every candidate send sits behind another blocked wait.
    Cycle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum AnomalyKind {
    SelfWait,
    Deadlock(DeadlockCause),
    Nondeterminacy,
    UnmatchedSend,
}

impl AnomalyKind {
    pub fn name(self) -> &'static str {
        match self {
            AnomalyKind::SelfWait => "self_wait",
            AnomalyKind::Deadlock(_) => "deadlock",
            AnomalyKind::Nondeterminacy => "nondeterminacy",
            AnomalyKind::UnmatchedSend => "unmatched_send",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Record {
    Wait(WaitRecord),
    Send(SendRecord),
}

impl Record {
    pub fn line(&self) -> usize {
        match self {
            Record::Wait(w) => w.line,
            Record::Send(s) => s.line,
        }
    }

    pub fn process(&self) -> ProcessId {
        match self {
            Record::Wait(w) => w.process,
            Record::Send(s) => s.process,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Anomaly {
    pub kind: AnomalyKind,
    pub subject: Record,
    pub witnesses: Vec<Record>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct AnomalyReport {
    pub anomalies: Vec<Anomaly>,
    pub waits_examined: usize,
    pub sends_examined: usize,
}

impl AnomalyReport {
    pub fn count(&self, name: &str) -> usize {
        self.anomalies.iter().filter(|a| a.kind.name() == name).count()
    }
}

fn lines_of<'a>(records: impl IntoIterator<Item = &'a Record>) -> String {
    records
        .into_iter()
        .map(|r| r.line().to_string())
        .collect::<Vec<_>>()
        .join(", ")
}

/// Classifies every wait and send and looks for circular waits.
///
/// Per wait, first match wins: waiting on its own process, no candidate send
/// (missing-send deadlock), exactly one candidate (fine), several candidates
/// (nondeterminacy). A send with no candidate wait is unmatched. Circular
/// waits use line order within a process as the ordering: a send cannot fire
/// while an earlier wait in its own process is blocked.
pub fn detect_anomalies(table: &MatchTable) -> AnomalyReport {
    let MatchTable {
        waits,
        sends,
        wait_candidates,
        send_candidates,
    } = table;
    let mut anomalies = Vec::new();

    for (wi, w) in waits.iter().enumerate() {
        let candidates = &wait_candidates[wi];
        let subject = Record::Wait(w.clone());
        if w.partner == Source::Process(w.process) {
            anomalies.push(Anomaly {
                kind: AnomalyKind::SelfWait,
                subject,
                witnesses: Vec::new(),
                message: format!("process {} waits for `{}` from itself", w.process, w.var),
            });
        } else if candidates.is_empty() {
            anomalies.push(Anomaly {
                kind: AnomalyKind::Deadlock(DeadlockCause::MissingSend),
                subject,
                witnesses: Vec::new(),
                message: format!(
                    "process {} waits for `{}` from {} but no send can satisfy it",
                    w.process, w.var, w.partner
                ),
            });
        } else if candidates.len() > 1 {
            let witnesses: Vec<Record> = candidates.iter().map(|&s| Record::Send(sends[s].clone())).collect();
            anomalies.push(Anomaly {
                kind: AnomalyKind::Nondeterminacy,
                message: format!(
                    "wait for `{}` in process {} matches {} sends (lines {})",
                    w.var,
                    w.process,
                    witnesses.len(),
                    lines_of(&witnesses)
                ),
                subject,
                witnesses,
            });
        }
    }

    for (si, s) in sends.iter().enumerate() {
        if send_candidates[si].is_empty() {
            anomalies.push(Anomaly {
                kind: AnomalyKind::UnmatchedSend,
                subject: Record::Send(s.clone()),
                witnesses: Vec::new(),
                message: format!(
                    "send of `{}` from process {} to process {} has no matching wait",
                    s.var, s.process, s.dest
                ),
            });
        }
    }

    anomalies.extend(circular_waits(table));
    anomalies.sort_by_key(|a| (a.subject.line(), a.kind));

    AnomalyReport {
        anomalies,
        waits_examined: waits.len(),
        sends_examined: sends.len(),
    }
}

fn circular_waits(table: &MatchTable) -> Vec<Anomaly> {
    let MatchTable {
        waits,
        sends,
        wait_candidates,
        ..
    } = table;
    let precedes = |w: usize, s: usize| waits[w].process == sends[s].process && waits[w].line < sends[s].line;

    // Largest set of waits each of whose candidate sends is stuck behind a wait of the set.
    let mut blocked: BTreeSet<usize> = (0..waits.len())
        .filter(|&w| waits[w].partner != Source::Process(waits[w].process) && !wait_candidates[w].is_empty())
        .collect();
    loop {
        let free: Vec<usize> = blocked
            .iter()
            .copied()
            .filter(|&w| {
                wait_candidates[w]
                    .iter()
                    .any(|&s| !blocked.iter().any(|&other| precedes(other, s)))
            })
            .collect();
        if free.is_empty() {
            break;
        }
        for w in free {
            blocked.remove(&w);
        }
    }

    let waits_on = |w: usize| -> Vec<usize> {
        blocked
            .iter()
            .copied()
            .filter(|&other| wait_candidates[w].iter().any(|&s| precedes(other, s)))
            .collect()
    };
    let reachable = |from: usize| -> BTreeSet<usize> {
        let mut seen = BTreeSet::new();
        let mut queue: VecDeque<usize> = waits_on(from).into();
        while let Some(w) = queue.pop_front() {
            if seen.insert(w) {
                queue.extend(waits_on(w));
            }
        }
        seen
    };
    let reach: Vec<(usize, BTreeSet<usize>)> = blocked.iter().map(|&w| (w, reachable(w))).collect();

    let mut done = BTreeSet::new();
    let mut out = Vec::new();
    for (w, from_w) in &reach {
        if done.contains(w) || !from_w.contains(w) {
            continue;
        }
        let component: Vec<usize> = reach
            .iter()
            .filter(|(v, from_v)| from_w.contains(v) && from_v.contains(w))
            .map(|(v, _)| *v)
            .collect();
        done.extend(component.iter().copied());

        let subject = Record::Wait(waits[component[0]].clone());
        let mut witnesses: Vec<Record> = component.iter().map(|&v| Record::Wait(waits[v].clone())).collect();
        if component.len() == 1 {
            // a process blocking its own later send
            witnesses.extend(wait_candidates[*w].iter().map(|&s| Record::Send(sends[s].clone())));
        }
        let processes: BTreeSet<ProcessId> = component.iter().map(|&v| waits[v].process).collect();
        let processes: Vec<String> = processes.iter().map(ToString::to_string).collect();
        out.push(Anomaly {
            kind: AnomalyKind::Deadlock(DeadlockCause::Cycle),
            message: format!(
                "circular wait among process {} (lines {})",
                processes.join(", "),
                lines_of(&witnesses)
            ),
            subject,
            witnesses,
        });
    }
    out
}
