use thiserror::Error;

use crate::anomaly::{
    detect_anomalies, extract_records, match_records, AnomalyError, AnomalyReport, SendRecord, WaitRecord,
};
use crate::cfg::{build_cfg, MpiCfg};
use crate::classify::{classify_statements, ClassifiedProgram, ClassifyError};
use crate::dataflow::{analyze_dataflow, DefUseReport, ReachAvail};
use crate::diag::Diagnostic;
use crate::frontend::{parse_source, FrontendError, SourceProgram};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnalysisOptions {
    pub defuse: bool,
    pub anomalies: bool,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions {
            defuse: true,
            anomalies: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AnalysisError {
    #[error(transparent)]
    Frontend(#[from] FrontendError),
    #[error(transparent)]
    Classify(#[from] ClassifyError),
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
}

impl AnalysisError {
    pub fn line(&self) -> usize {
        match self {
            AnalysisError::Frontend(e) => e.line(),
            AnalysisError::Classify(e) => e.line(),
            AnalysisError::Anomaly(e) => e.line(),
        }
    }

    pub fn to_diagnostic(&self) -> Diagnostic {
        let line = self.line();
        let text = self.to_string();
        let message = text.strip_prefix(&format!("line {line}: ")).unwrap_or(&text);
        Diagnostic::error(line, message)
    }
}

#[derive(Debug, Clone)]
pub struct Analysis {
    pub program: ClassifiedProgram,
    pub cfg: MpiCfg,
    pub reach: Option<ReachAvail>,
    pub defuse: Option<DefUseReport>,
    pub records: Option<(Vec<WaitRecord>, Vec<SendRecord>)>,
    pub anomalies: Option<AnomalyReport>,
    /// Warnings from every phase, sorted by line.
    pub diagnostics: Vec<Diagnostic>,
}

/// Parses, classifies and builds the graph, then runs the requested analyses.
pub fn analyze(source: &SourceProgram, options: &AnalysisOptions) -> Result<Analysis, AnalysisError> {
    let ast = parse_source(source)?;
    let program = classify_statements(&ast)?;
    let (cfg, cfg_diags) = build_cfg(&program);

    let mut diagnostics = program.diagnostics.clone();
    diagnostics.extend(cfg_diags);
    diagnostics.sort();

    let (reach, defuse) = if options.defuse {
        let (ra, report) = analyze_dataflow(&cfg);
        (Some(ra), Some(report))
    } else {
        (None, None)
    };

    let (records, anomalies) = if options.anomalies {
        let (waits, sends) = extract_records(&cfg)?;
        let report = detect_anomalies(&match_records(waits.clone(), sends.clone()));
        (Some((waits, sends)), Some(report))
    } else {
        (None, None)
    };

    Ok(Analysis {
        program,
        cfg,
        reach,
        defuse,
        records,
        anomalies,
        diagnostics,
    })
}
