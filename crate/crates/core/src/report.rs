//! Conformance statistics and their JSON, CSV and text renderings.

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::pipeline::{Approach, OutputFormat};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceReport {
    /// Log positions (0-based) of the traces with this label sequence.
    pub trace_ids: Vec<usize>,
    pub multiplicity: usize,
    pub original_length: usize,
    pub reduced_length: usize,
    pub k_red: usize,
    /// Standard cost of the (extended) alignment.
    pub cost: usize,
    /// `1 - cost / (|t| + shortest model run)`, clamped to `[0, 1]`.
    pub fitness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alignment: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub traces: usize,
    pub dropped_empty_traces: usize,
    pub distinct_traces: usize,
    pub distinct_reduced_traces: usize,
    pub total_cost: usize,
    /// Mean cost per trace, weighted by multiplicity.
    pub average_cost: f64,
    pub average_fitness: f64,
    /// Mean `k_red` per trace, weighted by multiplicity.
    pub average_reduction: f64,
    pub dijkstra_calls: usize,
    pub state_expansions: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub model_ms: u64,
    pub log_ms: u64,
    pub reduction_ms: u64,
    pub alignment_ms: u64,
    pub extension_ms: u64,
    pub total_ms: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConformanceReport {
    pub approach_requested: Approach,
    pub approach_used: Approach,
    pub summary: Summary,
    pub traces: Vec<TraceReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timings: Option<Timings>,
}

impl ConformanceReport {
    /// Recomputes the summary figures from the per-trace rows.
    pub fn is_consistent(&self) -> bool {
        let n: usize = self.traces.iter().map(|t| t.multiplicity).sum();
        let total: usize = self.traces.iter().map(|t| t.cost * t.multiplicity).sum();
        let close = |a: f64, b: f64| (a - b).abs() < 1e-9;
        let mean = |f: &dyn Fn(&TraceReport) -> f64| {
            if n == 0 {
                0.0
            } else {
                self.traces.iter().map(|t| f(t) * t.multiplicity as f64).sum::<f64>() / n as f64
            }
        };
        n == self.summary.traces
            && total == self.summary.total_cost
            && close(mean(&|t| t.cost as f64), self.summary.average_cost)
            && close(mean(&|t| t.fitness), self.summary.average_fitness)
            && close(mean(&|t| t.k_red as f64), self.summary.average_reduction)
            && self.traces.iter().all(|t| t.reduced_length + t.k_red == t.original_length)
    }
}

pub fn emit_report<W: Write>(report: &ConformanceReport, format: OutputFormat, mut sink: W) -> io::Result<()> {
    match format {
        OutputFormat::Json => {
            serde_json::to_writer_pretty(&mut sink, report)?;
            writeln!(sink)
        }
        OutputFormat::Csv => write_csv(report, sink),
        OutputFormat::Text => write_text(report, sink),
    }
}

fn write_csv<W: Write>(report: &ConformanceReport, sink: W) -> io::Result<()> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "row", "trace_ids", "multiplicity", "original_length", "reduced_length", "k_red", "cost", "fitness", "alignment",
    ])?;
    for t in &report.traces {
        let ids: Vec<String> = t.trace_ids.iter().map(ToString::to_string).collect();
        w.write_record([
            "trace".to_string(),
            ids.join(";"),
            t.multiplicity.to_string(),
            t.original_length.to_string(),
            t.reduced_length.to_string(),
            t.k_red.to_string(),
            t.cost.to_string(),
            format!("{:.6}", t.fitness),
            t.alignment.clone().unwrap_or_default(),
        ])?;
    }
    // Summary: trace count, mean reduction, total cost, mean fitness.
    let s = &report.summary;
    w.write_record([
        "summary".to_string(),
        String::new(),
        s.traces.to_string(),
        String::new(),
        String::new(),
        format!("{:.6}", s.average_reduction),
        s.total_cost.to_string(),
        format!("{:.6}", s.average_fitness),
        String::new(),
    ])?;
    w.flush()
}

fn write_text<W: Write>(report: &ConformanceReport, mut w: W) -> io::Result<()> {
    let s = &report.summary;
    writeln!(w, "approach           {} (requested {})", report.approach_used, report.approach_requested)?;
    writeln!(w, "traces             {} ({} distinct, {} after reduction)", s.traces, s.distinct_traces, s.distinct_reduced_traces)?;
    if s.dropped_empty_traces > 0 {
        writeln!(w, "dropped (empty)    {}", s.dropped_empty_traces)?;
    }
    writeln!(w, "total cost         {}", s.total_cost)?;
    writeln!(w, "average cost       {:.4}", s.average_cost)?;
    writeln!(w, "average fitness    {:.4}  (artifact-defined)", s.average_fitness)?;
    writeln!(w, "average reduction  {:.4}", s.average_reduction)?;
    writeln!(w, "dijkstra calls     {}", s.dijkstra_calls)?;
    writeln!(w, "state expansions   {}", s.state_expansions)?;
    if let Some(t) = &report.timings {
        writeln!(
            w,
            "time (ms)          model {} | log {} | reduction {} | alignment {} | extension {} | total {}",
            t.model_ms, t.log_ms, t.reduction_ms, t.alignment_ms, t.extension_ms, t.total_ms
        )?;
    }
    writeln!(w)?;
    writeln!(w, "{:<16} {:>5} {:>6} {:>7} {:>6} {:>6} {:>8}", "traces", "mult", "length", "reduced", "k_red", "cost", "fitness")?;
    for t in &report.traces {
        let ids: Vec<String> = t.trace_ids.iter().map(ToString::to_string).collect();
        let mut ids = ids.join(",");
        if ids.len() > 16 {
            ids.truncate(13);
            ids.push_str("...");
        }
        writeln!(
            w,
            "{:<16} {:>5} {:>6} {:>7} {:>6} {:>6} {:>8.4}",
            ids, t.multiplicity, t.original_length, t.reduced_length, t.k_red, t.cost, t.fitness
        )?;
        if let Some(a) = &t.alignment {
            writeln!(w, "  {a}")?;
        }
    }
    Ok(())
}
