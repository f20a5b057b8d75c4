//! End-to-end driver behind the `mpiflow analyze` command: runs the
//! pipeline, writes the optional DOT and record files, and renders the
//! result as text or JSON.
//!
//! Exit codes: 0 clean, 1 anomalies found, 2 parse/classify error, 3 usage or IO error.

use std::fmt::Write;
use std::path::PathBuf;

use serde::Serialize;

use crate::anomaly::{write_record_files, AnomalyReport, Record};
use crate::cfg::{emit_dot, EdgeCounts};
use crate::dataflow::DefUseReport;
use crate::diag::Diagnostic;
use crate::frontend::SourceProgram;
use crate::pipeline::{analyze, AnalysisOptions};

pub const EXIT_CLEAN: i32 = 0;
pub const EXIT_ANOMALIES: i32 = 1;
pub const EXIT_PROGRAM_ERROR: i32 = 2;
pub const EXIT_USAGE: i32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Text,
    Json,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisConfig {
    pub input_path: PathBuf,
    pub emit_dot: Option<PathBuf>,
    pub emit_records: Option<PathBuf>,
    pub want_defuse: bool,
    pub want_anomalies: bool,
    pub format: Format,
}

impl AnalysisConfig {
    /// Everything on, text output, no files written.
    pub fn new(input_path: impl Into<PathBuf>) -> Self {
        AnalysisConfig {
            input_path: input_path.into(),
            emit_dot: None,
            emit_records: None,
            want_defuse: true,
            want_anomalies: true,
            format: Format::Text,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CfgSummary {
    pub blocks: usize,
    pub edges: EdgeCounts,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnalysisResult {
    pub cfg_summary: CfgSummary,
    pub defuse: Option<DefUseReport>,
    pub anomalies: Option<AnomalyReport>,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub exit_code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl RunOutcome {
    fn failure(exit_code: i32, message: String) -> Self {
        RunOutcome {
            exit_code,
            stdout: String::new(),
            stderr: message + "\n",
        }
    }
}

pub fn run(config: &AnalysisConfig) -> RunOutcome {
    let path = config.input_path.display();
    let source = match SourceProgram::read(&config.input_path) {
        Ok(s) => s,
        Err(e) => return RunOutcome::failure(EXIT_USAGE, format!("error: cannot read {path}: {e}")),
    };
    // Records come from the anomaly pass, so asking for them turns it on.
    let options = AnalysisOptions {
        defuse: config.want_defuse,
        anomalies: config.want_anomalies || config.emit_records.is_some(),
    };
    let analysis = match analyze(&source, &options) {
        Ok(a) => a,
        Err(e) => return RunOutcome::failure(EXIT_PROGRAM_ERROR, format!("{path}: {}", e.to_diagnostic())),
    };

    if let Some(dot_path) = &config.emit_dot {
        if let Err(e) = std::fs::write(dot_path, emit_dot(&analysis.cfg)) {
            return RunOutcome::failure(EXIT_USAGE, format!("error: cannot write {}: {e}", dot_path.display()));
        }
    }
    if let (Some(dir), Some((waits, sends))) = (&config.emit_records, &analysis.records) {
        if let Err(e) = write_record_files(dir, waits, sends) {
            return RunOutcome::failure(
                EXIT_USAGE,
                format!("error: cannot write records to {}: {e}", dir.display()),
            );
        }
    }

    let result = AnalysisResult {
        cfg_summary: CfgSummary {
            blocks: analysis.cfg.blocks.len(),
            edges: analysis.cfg.edge_counts(),
        },
        defuse: analysis.defuse,
        anomalies: if config.want_anomalies {
            analysis.anomalies
        } else {
            None
        },
        diagnostics: analysis.diagnostics,
    };
    let found = result.anomalies.as_ref().is_some_and(|r| !r.anomalies.is_empty());
    RunOutcome {
        exit_code: if found { EXIT_ANOMALIES } else { EXIT_CLEAN },
        stdout: render(&result, config.format),
        stderr: String::new(),
    }
}

pub fn render(result: &AnalysisResult, format: Format) -> String {
    match format {
        Format::Text => render_text(result),
        Format::Json => render_json(result),
    }
}

fn plural(n: usize, word: &str) -> String {
    if n == 1 {
        format!("{n} {word}")
    } else {
        format!("{n} {word}s")
    }
}

fn render_text(result: &AnalysisResult) -> String {
    let mut out = String::new();
    let s = &result.cfg_summary;
    let _ = writeln!(
        out,
        "CFG SUMMARY: {}, {}, {}, {}",
        plural(s.blocks, "block"),
        plural(s.edges.sequential, "sequential edge"),
        plural(s.edges.parallel, "parallel edge"),
        plural(s.edges.synchronization, "synchronization edge"),
    );
    if let Some(defuse) = &result.defuse {
        out.push_str("\nDEF-USE:\n");
        out.push_str(&defuse.to_string());
    }
    if let Some(report) = &result.anomalies {
        let _ = writeln!(
            out,
            "\nANOMALIES: {} ({} waits, {} sends examined)",
            report.anomalies.len(),
            report.waits_examined,
            report.sends_examined
        );
        for a in &report.anomalies {
            let _ = writeln!(
                out,
                "{} line {} process {}: {}",
                a.kind.name(),
                a.subject.line(),
                a.subject.process(),
                a.message
            );
        }
    }
    out.push_str("\nDIAGNOSTICS:\n");
    for d in &result.diagnostics {
        let _ = writeln!(out, "{d}");
    }
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    summary: &'a CfgSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    defuse: Option<Vec<JsonDefinition<'a>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    anomalies: Option<Vec<JsonAnomaly<'a>>>,
    diagnostics: &'a [Diagnostic],
}

#[derive(Serialize)]
struct JsonDefinition<'a> {
    var: &'a str,
    line: usize,
    affected: Vec<usize>,
}

#[derive(Serialize)]
struct JsonAnomaly<'a> {
    kind: &'static str,
    line: usize,
    process: u32,
    witnesses: Vec<JsonWitness>,
    message: &'a str,
}

#[derive(Serialize)]
struct JsonWitness {
    line: usize,
    process: u32,
}

fn render_json(result: &AnalysisResult) -> String {
    let defuse = result.defuse.as_ref().map(|report| {
        let mut defs: Vec<JsonDefinition> = report
            .definitions
            .iter()
            .enumerate()
            .map(|(id, d)| JsonDefinition {
                var: &d.var,
                line: d.line,
                affected: report.affected[&id].iter().copied().collect(),
            })
            .collect();
        defs.sort_by(|a, b| (a.line, a.var).cmp(&(b.line, b.var)));
        defs
    });
    let witness = |r: &Record| JsonWitness {
        line: r.line(),
        process: r.process(),
    };
    let anomalies = result.anomalies.as_ref().map(|report| {
        report
            .anomalies
            .iter()
            .map(|a| JsonAnomaly {
                kind: a.kind.name(),
                line: a.subject.line(),
                process: a.subject.process(),
                witnesses: a.witnesses.iter().map(witness).collect(),
                message: &a.message,
            })
            .collect()
    });
    let report = JsonReport {
        summary: &result.cfg_summary,
        defuse,
        anomalies,
        diagnostics: &result.diagnostics,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("report serializes");
    text.push('\n');
    text
}

#[cfg(test)]
mod tests {
    use super::*;

    fn empty_result() -> AnalysisResult {
        AnalysisResult {
            cfg_summary: CfgSummary {
                blocks: 2,
                edges: EdgeCounts {
                    sequential: 1,
                    parallel: 0,
                    synchronization: 0,
                },
            },
            defuse: None,
            anomalies: Some(AnomalyReport::default()),
            diagnostics: vec![],
        }
    }

    #[test]
    fn empty_text_report() {
        let text = render(&empty_result(), Format::Text);
        assert!(text.starts_with("CFG SUMMARY: 2 blocks, 1 sequential edge,"), "{text}");
        assert!(text.contains("\nANOMALIES: 0 (0 waits, 0 sends examined)\n"));
        assert!(text.ends_with("DIAGNOSTICS:\n"));
    }

    #[test]
    fn json_parses_back() {
        let text = render(&empty_result(), Format::Json);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["summary"]["blocks"], 2);
        assert_eq!(v["summary"]["edges"]["sequential"], 1);
        assert_eq!(v["anomalies"].as_array().unwrap().len(), 0);
        assert!(v.get("defuse").is_none());
    }

    #[test]
    fn missing_input_is_usage_error() {
        let out = run(&AnalysisConfig::new("/definitely/not/here.mmpi"));
        assert_eq!(out.exit_code, EXIT_USAGE);
        assert!(out.stderr.starts_with("error: cannot read"));
    }
}
