//! Minimal XES reader: `<trace>` elements with `<event>` children whose
//! `concept:name` string attribute gives the label. Other attributes and
//! extensions are ignored.

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;

use super::trace::{EventLog, Trace};
use super::LogError;
use crate::Label;

fn attr(e: &BytesStart<'_>, key: &str) -> Option<String> {
    e.attributes()
        .flatten()
        .find(|a| a.key.as_ref() == key.as_bytes())
        .and_then(|a| a.unescape_value().ok().map(|v| v.into_owned()))
}

pub fn parse_xes<R: BufRead>(input: R) -> Result<EventLog, LogError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut stack: Vec<Vec<u8>> = Vec::new();
    let mut traces: Vec<Trace> = Vec::new();
    let mut current: Option<Vec<Label>> = None;
    let mut event_label: Option<Label> = None;
    let mut event_index = 0usize;

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| LogError::MalformedXml {
            position: reader.buffer_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = e.local_name().as_ref().to_vec();
                let parent = stack.last().map(Vec::as_slice);
                match name.as_slice() {
                    b"trace" if is_empty => traces.push(Trace::default()),
                    b"trace" => current = Some(Vec::new()),
                    b"event" if current.is_some() => {
                        event_index += 1;
                        event_label = None;
                        if is_empty {
                            return Err(LogError::MissingConceptName { event: event_index });
                        }
                    }
                    b"string" if parent == Some(b"event")
                        && attr(e, "key").as_deref() == Some("concept:name") => {
                            if let Some(v) = attr(e, "value") {
                                event_label = Some(Label::from(v));
                            }
                        }
                    _ => {}
                }
                if !is_empty {
                    stack.push(name);
                }
            }
            Event::End(ref e) => {
                stack.pop();
                match e.local_name().as_ref() {
                    b"event" => {
                        if let Some(labels) = current.as_mut() {
                            match event_label.take() {
                                Some(l) => labels.push(l),
                                None => return Err(LogError::MissingConceptName { event: event_index }),
                            }
                        }
                    }
                    b"trace" => {
                        if let Some(labels) = current.take() {
                            traces.push(Trace::new(labels));
                        }
                    }
                    _ => {}
                }
            }
            Event::Eof => break,
            _ => {}
        }
        buf.clear();
    }
    if !stack.is_empty() {
        return Err(LogError::MalformedXml {
            position: reader.buffer_position(),
            message: "unexpected end of input".into(),
        });
    }
    let log = EventLog::from_traces(traces);
    if log.dropped_empty > 0 {
        log::warn!("dropped {} trace(s) without events", log.dropped_empty);
    }
    Ok(log)
}

pub fn parse_xes_str(text: &str) -> Result<EventLog, LogError> {
    parse_xes(text.as_bytes())
}
