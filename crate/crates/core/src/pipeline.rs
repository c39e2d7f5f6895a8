//! End-to-end conformance run: model and log in, report out.

use std::fmt;
use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::align::{binary_search_align, standard_cost, AlignError, Aligner, Alignment, DEFAULT_EXPANSION_CAP};
use crate::extend::{extend_alignment, verify_proper, ExtendError, ProperViolation};
use crate::log::{build_dafsa, distinct_reduced_traces, parse_text_log, parse_xes, EventLog, LogError};
use crate::model::{
    build_reachability_graph, parse_pnml, validate_workflow_net, PnmlError, ReachabilityError, ReachabilityGraph,
    ValidationReport, WorkflowNet, DEFAULT_STATE_CAP,
};
use crate::report::{ConformanceReport, Summary, TraceReport, Timings};
use crate::tandem::{reduce_log, ReducedTrace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Approach {
    Automata,
    Tandem,
    Hybrid,
}

impl fmt::Display for Approach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Approach::Automata => "automata",
            Approach::Tandem => "tandem",
            Approach::Hybrid => "hybrid",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

/// Mean reduction per trace at which the hybrid approach picks tandem.
pub const HYBRID_THRESHOLD: f64 = 2.0;

#[derive(Debug, Clone)]
pub struct RunOptions {
    pub approach: Approach,
    pub emit_alignments: bool,
    pub verify: bool,
    pub timing: bool,
    pub threads: Option<usize>,
    pub state_cap: usize,
    pub expansion_cap: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            approach: Approach::Hybrid,
            emit_alignments: false,
            verify: cfg!(debug_assertions),
            timing: true,
            threads: None,
            state_cap: DEFAULT_STATE_CAP,
            expansion_cap: DEFAULT_EXPANSION_CAP,
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub model: PathBuf,
    pub log: PathBuf,
    pub options: RunOptions,
}

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("reading model {path}: {source}")]
    ReadModel { path: PathBuf, source: std::io::Error },
    #[error("parsing model: {0}")]
    ParseModel(#[from] PnmlError),
    #[error("validating model: {0}")]
    ValidateModel(#[from] ValidationReport),
    #[error("building reachability graph: {0}")]
    Reachability(#[from] ReachabilityError),
    #[error("reading log {path}: {source}")]
    ReadLog { path: PathBuf, source: std::io::Error },
    #[error("parsing log: {0}")]
    ParseLog(#[from] LogError),
    #[error("selecting approach: the model has concurrency at transition `{0}`, which the tandem approach does not support")]
    ConcurrentModelUnsupported(String),
    #[error("aligning: {0}")]
    Align(#[from] AlignError),
    #[error("extending alignment of trace {trace}: {source}")]
    Extend { trace: usize, source: ExtendError },
    #[error("verifying alignment of trace {trace}: {source}")]
    Verify { trace: usize, source: ProperViolation },
    #[error("starting worker pool: {0}")]
    Threads(#[from] rayon::ThreadPoolBuildError),
}

/// Mean `k_red` over all traces (each trace counted once per occurrence).
pub fn mean_reduction(reductions: &[ReducedTrace]) -> f64 {
    if reductions.is_empty() {
        0.0
    } else {
        reductions.iter().map(|r| r.k_red() as f64).sum::<f64>() / reductions.len() as f64
    }
}

/// Resolves the requested approach. Hybrid picks tandem when the mean
/// reduction reaches [`HYBRID_THRESHOLD`]. Tandem needs a model without
/// concurrency; hybrid falls back to automata on such models.
pub fn select_approach(
    requested: Approach,
    net: &WorkflowNet,
    reductions: Option<&[ReducedTrace]>,
) -> Result<Approach, PipelineError> {
    let concurrent = net.detect_concurrency();
    match requested {
        Approach::Automata => Ok(Approach::Automata),
        Approach::Tandem => match concurrent {
            Some(t) => Err(PipelineError::ConcurrentModelUnsupported(net.net().transitions()[t].id.clone())),
            None => Ok(Approach::Tandem),
        },
        Approach::Hybrid => {
            if concurrent.is_some() {
                return Ok(Approach::Automata);
            }
            let mean = reductions.map_or(0.0, mean_reduction);
            Ok(if mean >= HYBRID_THRESHOLD { Approach::Tandem } else { Approach::Automata })
        }
    }
}

fn ms(since: Instant) -> u64 {
    since.elapsed().as_millis() as u64
}

/// Reads the model and log named in `cfg` and runs the pipeline.
pub fn run(cfg: &RunConfig) -> Result<ConformanceReport, PipelineError> {
    let start = Instant::now();
    let file = File::open(&cfg.model).map_err(|source| PipelineError::ReadModel { path: cfg.model.clone(), source })?;
    let model = parse_pnml(BufReader::new(file))?;
    let net = validate_workflow_net(model.net, model.initial, model.final_place)?;
    let model_ms = ms(start);

    let t = Instant::now();
    let log = read_log(&cfg.log)?;
    let log_ms = ms(t);

    let mut report = run_on(&net, &log, &cfg.options)?;
    if let Some(timings) = report.timings.as_mut() {
        timings.model_ms += model_ms;
        timings.log_ms = log_ms;
        timings.total_ms = ms(start);
    }
    Ok(report)
}

/// Parses `path` as XES when it ends in `.xes`, as a text log otherwise.
pub fn read_log(path: &Path) -> Result<EventLog, PipelineError> {
    let file = File::open(path).map_err(|source| PipelineError::ReadLog { path: path.to_path_buf(), source })?;
    let reader = BufReader::new(file);
    let is_xes = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("xes"));
    Ok(if is_xes { parse_xes(reader)? } else { parse_text_log(reader)? })
}

/// Runs the pipeline on an already validated net and parsed log.
pub fn run_on(net: &WorkflowNet, log: &EventLog, opts: &RunOptions) -> Result<ConformanceReport, PipelineError> {
    match opts.threads {
        Some(n) => rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(|| run_inner(net, log, opts)),
        None => run_inner(net, log, opts),
    }
}

struct Outcome {
    reduction: Option<ReducedTrace>,
    alignment: Alignment,
}

fn run_inner(net: &WorkflowNet, log: &EventLog, opts: &RunOptions) -> Result<ConformanceReport, PipelineError> {
    let start = Instant::now();
    let rg = build_reachability_graph(net, opts.state_cap)?;
    let model_ms = ms(start);

    let t = Instant::now();
    let reductions = match opts.approach {
        Approach::Automata => None,
        _ => Some(reduce_log(log)),
    };
    let reduction_ms = ms(t);
    let used = select_approach(opts.approach, net, reductions.as_ref().map(|(_, r)| r.as_slice()))?;

    let t = Instant::now();
    let distinct = log.distinct();
    let (outcomes, calls, expansions, distinct_reduced, alignment_ms, extension_ms) = match used {
        Approach::Tandem => {
            let (set, reductions) = reductions.expect("computed for tandem");
            let dafsa = build_dafsa(&set);
            let aligner = Aligner::new(&dafsa, &rg).with_expansion_cap(opts.expansion_cap);
            let groups = distinct_reduced_traces(log, &reductions);
            let table = binary_search_align(&groups, &reductions, &aligner)?;
            let alignment_ms = ms(t);
            let t = Instant::now();
            let outcomes = distinct
                .par_iter()
                .map(|d| {
                    let id = d.ids[0];
                    let r = &reductions[id];
                    let reduced = table.get(id).expect("every trace aligned");
                    let alignment = extend_alignment(reduced, r).map_err(|source| PipelineError::Extend { trace: id, source })?;
                    Ok(Outcome { reduction: Some(r.clone()), alignment })
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            (outcomes, aligner.calls(), aligner.expansions(), groups.len(), alignment_ms, ms(t))
        }
        _ => {
            let dafsa = build_dafsa(distinct.iter().map(|d| &d.trace));
            let aligner = Aligner::new(&dafsa, &rg).with_expansion_cap(opts.expansion_cap);
            let outcomes = distinct
                .par_iter()
                .map(|d| Ok(Outcome { reduction: None, alignment: aligner.align_trace(&d.trace)? }))
                .collect::<Result<Vec<_>, PipelineError>>()?;
            (outcomes, aligner.calls(), aligner.expansions(), distinct.len(), ms(t), 0)
        }
    };

    if opts.verify {
        for (d, o) in distinct.iter().zip(&outcomes) {
            verify_proper(&o.alignment, &d.trace, &rg)
                .map_err(|source| PipelineError::Verify { trace: d.ids[0], source })?;
        }
    }

    let report = assemble(log, &rg, opts, used, &outcomes, calls, expansions, distinct_reduced);
    Ok(ConformanceReport {
        timings: opts.timing.then(|| Timings {
            model_ms,
            log_ms: 0,
            reduction_ms,
            alignment_ms,
            extension_ms,
            total_ms: ms(start),
        }),
        ..report
    })
}

/// `1 - cost / (|t| + shortest)`, or 1 when the denominator is zero.
pub fn fitness(cost: usize, trace_len: usize, shortest: usize) -> f64 {
    let denom = trace_len + shortest;
    if denom == 0 {
        1.0
    } else {
        (1.0 - cost as f64 / denom as f64).clamp(0.0, 1.0)
    }
}

#[allow(clippy::too_many_arguments)]
fn assemble(
    log: &EventLog,
    rg: &ReachabilityGraph,
    opts: &RunOptions,
    used: Approach,
    outcomes: &[Outcome],
    calls: usize,
    expansions: usize,
    distinct_reduced: usize,
) -> ConformanceReport {
    let shortest = rg.fsm().shortest_accepting_length().unwrap_or(0);
    let traces: Vec<TraceReport> = log
        .distinct()
        .iter()
        .zip(outcomes)
        .map(|(d, o)| {
            let k_red = o.reduction.as_ref().map_or(0, ReducedTrace::k_red);
            let cost = standard_cost(&o.alignment);
            TraceReport {
                trace_ids: d.ids.clone(),
                multiplicity: d.multiplicity(),
                original_length: d.trace.len(),
                reduced_length: d.trace.len() - k_red,
                k_red,
                cost,
                fitness: fitness(cost, d.trace.len(), shortest),
                alignment: opts.emit_alignments.then(|| o.alignment.render()),
            }
        })
        .collect();
    let n = log.len();
    let weighted = |f: &dyn Fn(&TraceReport) -> f64| {
        if n == 0 {
            0.0
        } else {
            traces.iter().map(|t| f(t) * t.multiplicity as f64).sum::<f64>() / n as f64
        }
    };
    let summary = Summary {
        traces: n,
        dropped_empty_traces: log.dropped_empty,
        distinct_traces: log.distinct().len(),
        distinct_reduced_traces: distinct_reduced,
        total_cost: traces.iter().map(|t| t.cost * t.multiplicity).sum(),
        average_cost: weighted(&|t| t.cost as f64),
        average_fitness: weighted(&|t| t.fitness),
        average_reduction: weighted(&|t| t.k_red as f64),
        dijkstra_calls: calls,
        state_expansions: expansions,
    };
    ConformanceReport { approach_requested: opts.approach, approach_used: used, summary, traces, timings: None }
}
