//! Communication anomaly detection.
//!
//! Receives are "waits" and sends are non-blocking. Records are matched on
//! their envelope (destination, source or `any`, tag) without regard to
//! control flow, so sends on exclusive branches both count as candidates.

mod detect;
mod records;

pub use detect::{
    can_match, detect_anomalies, match_records, Anomaly, AnomalyKind, AnomalyReport, DeadlockCause, MatchTable, Record,
};
pub use records::{
    extract_records, read_record_files, write_record_files, AnomalyError, RecordParseError, SendRecord, WaitRecord,
    SENDS_FILE, WAITS_FILE,
};

use crate::cfg::MpiCfg;

pub fn analyze_anomalies(cfg: &MpiCfg) -> Result<AnomalyReport, AnomalyError> {
    let (waits, sends) = extract_records(cfg)?;
    Ok(detect_anomalies(&match_records(waits, sends)))
}
