use std::fmt;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::cfg::{MpiCfg, Section};
use crate::classify::Op;
use crate::frontend::{ProcessId, Source, Tag};

/// A blocking receive: `process` waits for `var` from `partner`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct WaitRecord {
    pub process: ProcessId,
    pub line: usize,
    pub var: String,
    pub partner: Source,
    pub tag: Tag,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct SendRecord {
    pub process: ProcessId,
    pub line: usize,
    pub var: String,
    pub dest: ProcessId,
    pub tag: Tag,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnomalyError {
    #[error("line {line}: send/recv outside any process section")]
    CommOutsideSection { line: usize },
}

impl AnomalyError {
    pub fn line(&self) -> usize {
        match self {
            AnomalyError::CommOutsideSection { line } => *line,
        }
    }
}

/// Collects one wait per `recv` and one send record per `send`, in source order.
pub fn extract_records(cfg: &MpiCfg) -> Result<(Vec<WaitRecord>, Vec<SendRecord>), AnomalyError> {
    let mut waits = Vec::new();
    let mut sends = Vec::new();
    for block in &cfg.blocks {
        for stmt in &block.stmts {
            let (var, comm) = match &stmt.op {
                Op::Send { var, .. } | Op::Recv { var, .. } => (var, &stmt.op),
                _ => continue,
            };
            let Section::Process(process) = block.section else {
                return Err(AnomalyError::CommOutsideSection { line: stmt.line });
            };
            match *comm {
                Op::Send { dest, tag, .. } => sends.push(SendRecord {
                    process,
                    line: stmt.line,
                    var: var.clone(),
                    dest,
                    tag,
                }),
                Op::Recv { source, tag, .. } => waits.push(WaitRecord {
                    process,
                    line: stmt.line,
                    var: var.clone(),
                    partner: source,
                    tag,
                }),
                _ => unreachable!(),
            }
        }
    }
    waits.sort_by_key(|w| w.line);
    sends.sort_by_key(|s| s.line);
    Ok((waits, sends))
}

impl fmt::Display for WaitRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "W process={} line={} var={} from={} tag={}",
            self.process, self.line, self.var, self.partner, self.tag
        )
    }
}

impl fmt::Display for SendRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "S process={} line={} var={} to={} tag={}",
            self.process, self.line, self.var, self.dest, self.tag
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed record `{0}`")]
pub struct RecordParseError(pub String);

/// Splits `P k1=v1 k2=v2 ...`, checking the prefix and key order.
fn fields<'a>(s: &'a str, prefix: &str, keys: &[&str]) -> Result<Vec<&'a str>, RecordParseError> {
    let bad = || RecordParseError(s.to_string());
    let mut parts = s.split_whitespace();
    if parts.next() != Some(prefix) {
        return Err(bad());
    }
    let mut out = Vec::with_capacity(keys.len());
    for key in keys {
        let (k, v) = parts.next().and_then(|p| p.split_once('=')).ok_or_else(bad)?;
        if k != *key || v.is_empty() {
            return Err(bad());
        }
        out.push(v);
    }
    if parts.next().is_some() {
        return Err(bad());
    }
    Ok(out)
}

fn num<T: FromStr>(s: &str, whole: &str) -> Result<T, RecordParseError> {
    s.parse().map_err(|_| RecordParseError(whole.to_string()))
}

impl FromStr for WaitRecord {
    type Err = RecordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let f = fields(s, "W", &["process", "line", "var", "from", "tag"])?;
        let partner = match f[3] {
            "any" => Source::Any,
            p => Source::Process(num(p, s)?),
        };
        Ok(WaitRecord {
            process: num(f[0], s)?,
            line: num(f[1], s)?,
            var: f[2].to_string(),
            partner,
            tag: num(f[4], s)?,
        })
    }
}

impl FromStr for SendRecord {
    type Err = RecordParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let f = fields(s, "S", &["process", "line", "var", "to", "tag"])?;
        Ok(SendRecord {
            process: num(f[0], s)?,
            line: num(f[1], s)?,
            var: f[2].to_string(),
            dest: num(f[3], s)?,
            tag: num(f[4], s)?,
        })
    }
}

pub const WAITS_FILE: &str = "waits.txt";
pub const SENDS_FILE: &str = "sends.txt";

/// Writes `waits.txt` and `sends.txt` into `dir`, creating it if needed.
pub fn write_record_files(dir: &Path, waits: &[WaitRecord], sends: &[SendRecord]) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    let render = |lines: Vec<String>| lines.into_iter().map(|l| l + "\n").collect::<String>();
    fs::write(
        dir.join(WAITS_FILE),
        render(waits.iter().map(ToString::to_string).collect()),
    )?;
    fs::write(
        dir.join(SENDS_FILE),
        render(sends.iter().map(ToString::to_string).collect()),
    )?;
    Ok(())
}

/// Reads back the files written by [`write_record_files`].
pub fn read_record_files(dir: &Path) -> io::Result<(Vec<WaitRecord>, Vec<SendRecord>)> {
    fn parse_lines<T: FromStr<Err = RecordParseError>>(text: &str) -> io::Result<Vec<T>> {
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| l.parse().map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e)))
            .collect()
    }
    let waits = parse_lines(&fs::read_to_string(dir.join(WAITS_FILE))?)?;
    let sends = parse_lines(&fs::read_to_string(dir.join(SENDS_FILE))?)?;
    Ok((waits, sends))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn record_line_format() {
        let w = WaitRecord {
            process: 0,
            line: 6,
            var: "received".into(),
            partner: Source::Any,
            tag: 0,
        };
        assert_eq!(w.to_string(), "W process=0 line=6 var=received from=any tag=0");
        let s = SendRecord {
            process: 1,
            line: 18,
            var: "x".into(),
            dest: 0,
            tag: 2,
        };
        assert_eq!(s.to_string(), "S process=1 line=18 var=x to=0 tag=2");
    }

    #[test]
    fn malformed_records() {
        assert!("W process=0 line=6 var=a from=any".parse::<WaitRecord>().is_err());
        assert!("S process=0 line=6 var=a from=1 tag=0".parse::<SendRecord>().is_err());
        assert!("W process=x line=6 var=a from=any tag=0".parse::<WaitRecord>().is_err());
        assert!("W process=0 line=6 var=a from=any tag=0 extra=1"
            .parse::<WaitRecord>()
            .is_err());
    }
}
