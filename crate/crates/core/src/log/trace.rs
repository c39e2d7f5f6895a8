use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::Label;

/// A finite sequence of activity labels.
///
/// Positions are 1-based where the API says so (`at`), matching the way
/// repeats and reductions address traces.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Trace(Vec<Label>);

impl Trace {
    pub fn new(labels: Vec<Label>) -> Self {
        Trace(labels)
    }

    pub fn from_strs<S: AsRef<str>>(labels: &[S]) -> Self {
        Trace(labels.iter().map(|s| Label::from(s.as_ref())).collect())
    }

    /// One label per character, e.g. `"ABDF"`. Handy for single-letter logs.
    pub fn from_chars(s: &str) -> Self {
        Trace(s.chars().map(|c| Label::from(c.to_string())).collect())
    }

    /// `t[i]` for `1 ≤ i ≤ |t|`.
    pub fn at(&self, i: usize) -> &Label {
        &self.0[i - 1]
    }

    pub fn labels(&self) -> &[Label] {
        &self.0
    }

    pub fn into_labels(self) -> Vec<Label> {
        self.0
    }
}

impl Deref for Trace {
    type Target = [Label];

    fn deref(&self) -> &[Label] {
        &self.0
    }
}

impl From<Vec<Label>> for Trace {
    fn from(labels: Vec<Label>) -> Self {
        Trace(labels)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<")?;
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{l}")?;
        }
        write!(f, ">")
    }
}

/// A distinct trace and the ids (0-based log positions) of its occurrences.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistinctTrace {
    pub trace: Trace,
    pub ids: Vec<usize>,
}

impl DistinctTrace {
    pub fn multiplicity(&self) -> usize {
        self.ids.len()
    }
}

/// An ordered collection of non-empty traces with a distinct-trace index.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct EventLog {
    traces: Vec<Trace>,
    distinct: Vec<DistinctTrace>,
    /// Traces without events dropped during parsing.
    pub dropped_empty: usize,
}

impl EventLog {
    /// Builds a log, dropping empty traces and counting them.
    pub fn from_traces<I: IntoIterator<Item = Trace>>(traces: I) -> Self {
        let mut log = EventLog::default();
        let mut index: HashMap<Trace, usize> = HashMap::new();
        for trace in traces {
            if trace.is_empty() {
                log.dropped_empty += 1;
                continue;
            }
            let id = log.traces.len();
            match index.get(&trace) {
                Some(&d) => log.distinct[d].ids.push(id),
                None => {
                    index.insert(trace.clone(), log.distinct.len());
                    log.distinct.push(DistinctTrace { trace: trace.clone(), ids: vec![id] });
                }
            }
            log.traces.push(trace);
        }
        log
    }

    pub fn traces(&self) -> &[Trace] {
        &self.traces
    }

    pub fn len(&self) -> usize {
        self.traces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.traces.is_empty()
    }

    /// Distinct traces in order of first occurrence.
    pub fn distinct(&self) -> &[DistinctTrace] {
        &self.distinct
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distinct_index_counts_multiplicities() {
        let log = EventLog::from_traces([
            Trace::from_chars("A"),
            Trace::from_chars("AB"),
            Trace::from_chars("A"),
            Trace::default(),
        ]);
        assert_eq!(log.len(), 3);
        assert_eq!(log.dropped_empty, 1);
        assert_eq!(log.distinct().len(), 2);
        assert_eq!(log.distinct()[0].ids, vec![0, 2]);
        assert_eq!(log.distinct().iter().map(DistinctTrace::multiplicity).sum::<usize>(), log.len());
    }

    #[test]
    fn one_based_access() {
        let t = Trace::from_chars("XYZ");
        assert_eq!(t.at(1).as_ref(), "X");
        assert_eq!(t.at(3).as_ref(), "Z");
        assert_eq!(t.to_string(), "<X,Y,Z>");
    }
}
