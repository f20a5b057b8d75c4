//! Static analysis of SPMD message-passing programs.
//!
//! Programs are written in a small line-oriented language (`.mmpi`) with
//! assignments, conditionals and MPI-style primitives. The crate builds an
//! MPI-aware control-flow graph, computes def-use information that respects
//! per-process locality, and reports communication anomalies: self-waits,
//! deadlocks, nondeterministic receives, and unmatched sends.
//!
//! ```
//! use mpiflow_core::{analyze, AnalysisOptions, SourceProgram};
//!
//! let src = SourceProgram::from_text(
//!     "demo.mmpi",
//!     "mpi_init\nmpi_comm_rank(me)\nif me == 1 then\nsend v to 0\nendif\nmpi_finalize\n",
//! );
//! let analysis = analyze(&src, &AnalysisOptions::default()).unwrap();
//! assert_eq!(analysis.anomalies.unwrap().count("unmatched_send"), 1);
//! ```

pub mod anomaly;
pub mod batch;
pub mod cfg;
pub mod classify;
pub mod cli;
pub mod dataflow;
pub mod diag;
pub mod frontend;
pub mod pipeline;
pub mod synth;

pub use diag::{Diagnostic, Level};
pub use frontend::SourceProgram;
pub use pipeline::{analyze, Analysis, AnalysisError, AnalysisOptions};
