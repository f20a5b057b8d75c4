use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use mpiflow_core::cli::{run, AnalysisConfig, Format, EXIT_USAGE};

#[derive(Parser)]
#[command(
    name = "mpiflow",
    version,
    about = "Def-use and communication anomaly analysis for .mmpi programs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze one program. Without --dot/--defuse/--anomalies, both reports are produced.
    Analyze {
        file: PathBuf,
        /// Write the MPI control-flow graph as GraphViz DOT.
        #[arg(long, value_name = "OUT")]
        dot: Option<PathBuf>,
        /// Write waits.txt and sends.txt into this directory.
        #[arg(long, value_name = "DIR")]
        records: Option<PathBuf>,
        #[arg(long)]
        defuse: bool,
        #[arg(long)]
        anomalies: bool,
        #[arg(long, value_enum, default_value_t = OutputFormat::Text)]
        format: OutputFormat,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Json,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE as u8)
            } else {
                ExitCode::SUCCESS
            };
        }
    };

    let Command::Analyze {
        file,
        dot,
        records,
        defuse,
        anomalies,
        format,
    } = cli.command;
    let nothing_selected = dot.is_none() && !defuse && !anomalies;
    let config = AnalysisConfig {
        input_path: file,
        emit_dot: dot,
        emit_records: records,
        want_defuse: defuse || nothing_selected,
        want_anomalies: anomalies || nothing_selected,
        format: match format {
            OutputFormat::Text => Format::Text,
            OutputFormat::Json => Format::Json,
        },
    };

    let outcome = run(&config);
    let _ = std::io::stdout().write_all(outcome.stdout.as_bytes());
    let _ = std::io::stderr().write_all(outcome.stderr.as_bytes());
    ExitCode::from(outcome.exit_code as u8)
}
