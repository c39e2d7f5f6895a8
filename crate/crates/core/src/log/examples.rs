//! The five-trace running-example log used throughout the tests.

use super::trace::{EventLog, Trace};

pub const RUNNING_TRACES: [&str; 5] = [
    "ABCCCC",
    "ABDEEFBDEEFBDEEFBC",
    "ABDFBDFBDFBD",
    "ABDFBDFBDFBDFBD",
    "ABDFBDFBDFBDFBDFBD",
];

pub fn running_log() -> EventLog {
    EventLog::from_traces(RUNNING_TRACES.iter().map(|s| Trace::from_chars(s)))
}
