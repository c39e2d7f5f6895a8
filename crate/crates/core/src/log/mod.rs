//! Event logs, their parsers, and the DAFSA of a trace set.

mod dafsa;
pub mod examples;
mod text;
mod trace;
mod xes;

use std::collections::HashMap;

use thiserror::Error;

pub use dafsa::{build_dafsa, Dafsa};
pub use text::{parse_text_log, parse_text_log_str};
pub use trace::{DistinctTrace, EventLog, Trace};
pub use xes::{parse_xes, parse_xes_str};

use crate::tandem::ReducedTrace;

#[derive(Debug, Error)]
pub enum LogError {
    #[error("malformed XML at byte {position}: {message}")]
    MalformedXml { position: u64, message: String },
    #[error("event {event} has no concept:name attribute")]
    MissingConceptName { event: usize },
    #[error("empty label at line {line}, column {column}")]
    EmptyLabel { line: usize, column: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Original traces sharing one reduced label sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedGroup {
    pub reduced: Trace,
    /// Original trace ids, ascending.
    pub ids: Vec<usize>,
}

/// Groups trace ids by reduced label sequence. `reductions[id]` is the
/// reduction of trace `id`. Groups appear in order of first occurrence.
pub fn distinct_reduced_traces(log: &EventLog, reductions: &[ReducedTrace]) -> Vec<ReducedGroup> {
    assert_eq!(log.len(), reductions.len(), "one reduction per trace");
    let mut index: HashMap<&Trace, usize> = HashMap::new();
    let mut groups: Vec<ReducedGroup> = Vec::new();
    for (id, r) in reductions.iter().enumerate() {
        let g = *index.entry(r.labels()).or_insert_with(|| {
            groups.push(ReducedGroup { reduced: r.labels().clone(), ids: Vec::new() });
            groups.len() - 1
        });
        groups[g].ids.push(id);
    }
    groups
}
