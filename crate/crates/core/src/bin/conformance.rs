use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use tandem_conformance::align::DEFAULT_EXPANSION_CAP;
use tandem_conformance::model::DEFAULT_STATE_CAP;
use tandem_conformance::pipeline::{run, Approach, OutputFormat, RunConfig, RunOptions};
use tandem_conformance::report::emit_report;

/// Align an event log against a workflow net and report conformance costs.
#[derive(Debug, Parser)]
#[command(name = "conformance", version)]
struct Cli {
    /// Workflow net in PNML.
    #[arg(long, env = "CONFORMANCE_MODEL")]
    model: PathBuf,

    /// Event log: `.xes`, or a text file with one comma-separated trace per line.
    #[arg(long, env = "CONFORMANCE_LOG")]
    log: PathBuf,

    /// `automata` aligns every distinct trace; `tandem` aligns reduced traces
    /// and extends them; `hybrid` picks one from the log's repetitiveness.
    #[arg(long, value_enum, env = "CONFORMANCE_APPROACH")]
    approach: Approach,

    /// Report format.
    #[arg(long, value_enum, default_value = "json", env = "CONFORMANCE_OUTPUT")]
    output: OutputFormat,

    /// Include each alignment in the report.
    #[arg(long, env = "CONFORMANCE_EMIT_ALIGNMENTS")]
    emit_alignments: bool,

    /// Check that every alignment is proper (always on in debug builds).
    #[arg(long, env = "CONFORMANCE_VERIFY")]
    verify: bool,

    /// Leave wall-clock timings out of the report.
    #[arg(long, env = "CONFORMANCE_NO_TIMING")]
    no_timing: bool,

    /// Worker threads (default: one per core).
    #[arg(long, env = "CONFORMANCE_THREADS", value_parser = clap::value_parser!(u64).range(1..))]
    threads: Option<u64>,

    /// Limit on reachability-graph nodes plus arcs.
    #[arg(long, env = "CONFORMANCE_STATE_CAP", default_value_t = DEFAULT_STATE_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    state_cap: u64,

    /// Limit on states expanded per alignment search.
    #[arg(long, env = "CONFORMANCE_EXPANSION_CAP", default_value_t = DEFAULT_EXPANSION_CAP as u64, value_parser = clap::value_parser!(u64).range(1..))]
    expansion_cap: u64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let cfg = RunConfig {
        model: cli.model,
        log: cli.log,
        options: RunOptions {
            approach: cli.approach,
            emit_alignments: cli.emit_alignments,
            verify: cli.verify || cfg!(debug_assertions),
            timing: !cli.no_timing,
            threads: cli.threads.map(|n| n as usize),
            state_cap: cli.state_cap as usize,
            expansion_cap: cli.expansion_cap as usize,
        },
    };
    let report = match run(&cfg) {
        Ok(report) => report,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    if let Err(e) = emit_report(&report, cli.output, &mut out).and_then(|_| out.flush()) {
        eprintln!("error: writing report: {e}");
        return ExitCode::FAILURE;
    }
    ExitCode::SUCCESS
}
