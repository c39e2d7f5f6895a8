//! Plain-text logs: one trace per line, labels separated by commas.

use std::io::BufRead;

use super::trace::{EventLog, Trace};
use super::LogError;
use crate::Label;

pub fn parse_text_log<R: BufRead>(input: R) -> Result<EventLog, LogError> {
    let mut traces = Vec::new();
    for (n, line) in input.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let mut labels = Vec::new();
        for (col, field) in line.split(',').enumerate() {
            let label = field.trim();
            if label.is_empty() {
                return Err(LogError::EmptyLabel { line: n + 1, column: col + 1 });
            }
            labels.push(Label::from(label));
        }
        traces.push(Trace::new(labels));
    }
    Ok(EventLog::from_traces(traces))
}

pub fn parse_text_log_str(text: &str) -> Result<EventLog, LogError> {
    parse_text_log(text.as_bytes())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_trace_per_line() {
        let log = parse_text_log_str("A,B,C\nA,B").unwrap();
        assert_eq!(log.traces(), &[Trace::from_chars("ABC"), Trace::from_chars("AB")]);
    }

    #[test]
    fn trims_and_skips_blank_lines() {
        let log = parse_text_log_str("\nA, B ,C\n   \n").unwrap();
        assert_eq!(log.traces(), &[Trace::from_chars("ABC")]);
    }

    #[test]
    fn empty_label_is_an_error() {
        assert!(matches!(
            parse_text_log_str("A\nA,,B"),
            Err(LogError::EmptyLabel { line: 2, column: 2 })
        ));
    }
}
