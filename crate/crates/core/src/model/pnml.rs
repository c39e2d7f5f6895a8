//! Reader for the place/transition subset of PNML.
//!
//! Pages are flattened. A transition whose `<name>` is absent or empty, or
//! that carries a `<toolspecific>` element with an `invisible` attribute
//! value, is silent.

use std::io::BufRead;

use quick_xml::events::{BytesStart, Event};
use quick_xml::Reader;
use thiserror::Error;

use super::net::{NetError, PetriNet, PlaceId};

#[derive(Debug, Error)]
pub enum PnmlError {
    #[error("malformed XML at byte {position}: {message}")]
    MalformedXml { position: u64, message: String },
    #[error("<{element}> is missing attribute `{attribute}`")]
    MissingAttribute { element: &'static str, attribute: &'static str },
    #[error("no <net> element found")]
    NoNet,
    #[error(transparent)]
    Net(#[from] NetError),
    #[error("cannot determine the initial place: {0}")]
    InitialPlace(String),
    #[error("cannot determine the final place: {0}")]
    FinalPlace(String),
}

/// A parsed net together with its initial and final place.
#[derive(Debug, Clone)]
pub struct PnmlModel {
    pub net: PetriNet,
    pub initial: PlaceId,
    pub final_place: PlaceId,
}

#[derive(Default)]
struct RawTransition {
    id: String,
    name: Option<String>,
    invisible: bool,
}

#[derive(Default)]
struct RawNet {
    places: Vec<(String, u32)>,
    transitions: Vec<RawTransition>,
    arcs: Vec<(String, String)>,
    final_marking: Vec<(String, u32)>,
}

fn attr(e: &BytesStart<'_>, key: &str) -> Option<String> {
    e.attributes()
        .flatten()
        .find(|a| a.key.local_name().as_ref() == key.as_bytes())
        .and_then(|a| a.unescape_value().ok().map(|v| v.into_owned()))
}

fn required(e: &BytesStart<'_>, element: &'static str, attribute: &'static str) -> Result<String, PnmlError> {
    attr(e, attribute).ok_or(PnmlError::MissingAttribute { element, attribute })
}

pub fn parse_pnml_str(text: &str) -> Result<PnmlModel, PnmlError> {
    parse_pnml(text.as_bytes())
}

pub fn parse_pnml<R: BufRead>(input: R) -> Result<PnmlModel, PnmlError> {
    let raw = read_raw(input)?;
    assemble(raw)
}

fn read_raw<R: BufRead>(input: R) -> Result<RawNet, PnmlError> {
    let mut reader = Reader::from_reader(input);
    reader.config_mut().trim_text(true);
    let mut buf = Vec::new();
    let mut stack: Vec<String> = Vec::new();
    let mut raw = RawNet::default();
    let mut nets_seen = 0usize;
    // Nested nets after the first are skipped entirely.
    let mut skip_depth: Option<usize> = None;
    let mut final_place: Option<String> = None;

    loop {
        let event = reader.read_event_into(&mut buf).map_err(|e| PnmlError::MalformedXml {
            position: reader.buffer_position(),
            message: e.to_string(),
        })?;
        match event {
            Event::Start(ref e) | Event::Empty(ref e) => {
                let is_empty = matches!(event, Event::Empty(_));
                let name = String::from_utf8_lossy(e.local_name().as_ref()).into_owned();
                if skip_depth.is_none() {
                    match name.as_str() {
                        "net" => {
                            nets_seen += 1;
                            if nets_seen > 1 {
                                skip_depth = Some(stack.len());
                            }
                        }
                        "place" if stack.iter().any(|s| s == "finalmarkings") => {
                            final_place = Some(required(e, "place", "idref")?);
                        }
                        "place" => raw.places.push((required(e, "place", "id")?, 0)),
                        "transition" => raw.transitions.push(RawTransition {
                            id: required(e, "transition", "id")?,
                            ..Default::default()
                        }),
                        "arc" => raw
                            .arcs
                            .push((required(e, "arc", "source")?, required(e, "arc", "target")?)),
                        "toolspecific" if stack.last().map(String::as_str) == Some("transition") => {
                            let invisible = e.attributes().flatten().any(|a| {
                                a.unescape_value()
                                    .map(|v| v.to_ascii_lowercase().contains("invisible"))
                                    .unwrap_or(false)
                            });
                            if invisible {
                                if let Some(t) = raw.transitions.last_mut() {
                                    t.invisible = true;
                                }
                            }
                        }
                        _ => {}
                    }
                }
                if !is_empty {
                    stack.push(name);
                }
            }
            Event::End(_) => {
                stack.pop();
                if skip_depth == Some(stack.len()) {
                    skip_depth = None;
                }
            }
            Event::Text(t) if skip_depth.is_none() => {
                let text = t
                    .unescape()
                    .map_err(|e| PnmlError::MalformedXml {
                        position: reader.buffer_position(),
                        message: e.to_string(),
                    })?
                    .trim()
                    .to_string();
                let tail: Vec<&str> = stack.iter().rev().take(3).map(String::as_str).collect();
                let in_finals = stack.iter().any(|s| s == "finalmarkings");
                match tail.as_slice() {
                    ["text", "name", "transition", ..] => {
                        if let Some(t) = raw.transitions.last_mut() {
                            t.name = Some(text);
                        }
                    }
                    ["text", "initialMarking", "place", ..] if !in_finals => {
                        if let Some(p) = raw.places.last_mut() {
                            p.1 = parse_tokens(&text);
                        }
                    }
                    ["text", "place", ..] if in_finals => {
                        if let Some(id) = final_place.take() {
                            raw.final_marking.push((id, parse_tokens(&text)));
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
    if nets_seen == 0 {
        return Err(PnmlError::NoNet);
    }
    Ok(raw)
}

fn parse_tokens(text: &str) -> u32 {
    // ProM writes "Default,1"; plain PNML writes "1".
    text.rsplit(',').next().and_then(|s| s.trim().parse().ok()).unwrap_or(0)
}

fn assemble(raw: RawNet) -> Result<PnmlModel, PnmlError> {
    let mut net = PetriNet::new();
    for (id, _) in &raw.places {
        net.add_place(id.clone())?;
    }
    for t in &raw.transitions {
        let label = match &t.name {
            Some(name) if !name.is_empty() && !t.invisible => Some(name.as_str()),
            _ => None,
        };
        net.add_transition(t.id.clone(), label)?;
    }
    for (s, d) in &raw.arcs {
        net.add_flow(s, d)?;
    }

    let marked: Vec<&str> = raw.places.iter().filter(|(_, n)| *n > 0).map(|(id, _)| id.as_str()).collect();
    let initial = match marked.as_slice() {
        [one] => net.place_id(one).expect("declared place"),
        [] => unique_place(&net, |p| net.place_preset(p).is_empty())
            .map_err(PnmlError::InitialPlace)?,
        _ => return Err(PnmlError::InitialPlace("more than one place is initially marked".into())),
    };
    let final_marked: Vec<&str> =
        raw.final_marking.iter().filter(|(_, n)| *n > 0).map(|(id, _)| id.as_str()).collect();
    let final_place = match final_marked.as_slice() {
        [one] => net
            .place_id(one)
            .ok_or_else(|| PnmlError::FinalPlace(format!("unknown place `{one}`")))?,
        [] => unique_place(&net, |p| net.place_postset(p).is_empty())
            .map_err(PnmlError::FinalPlace)?,
        _ => return Err(PnmlError::FinalPlace("final marking covers more than one place".into())),
    };
    Ok(PnmlModel { net, initial, final_place })
}

fn unique_place(net: &PetriNet, pred: impl Fn(PlaceId) -> bool) -> Result<PlaceId, String> {
    let candidates: Vec<PlaceId> = (0..net.places().len()).filter(|&p| pred(p)).collect();
    match candidates.as_slice() {
        [one] => Ok(*one),
        [] => Err("no candidate place".into()),
        many => Err(format!(
            "{} candidate places ({})",
            many.len(),
            many.iter().map(|&p| net.places()[p].as_str()).collect::<Vec<_>>().join(", ")
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIMPLE: &str = r#"<?xml version="1.0" encoding="UTF-8"?>
<pnml>
  <net id="n1" type="http://www.pnml.org/version-2009/grammar/ptnet">
    <page id="page1">
      <place id="start"><initialMarking><text>1</text></initialMarking></place>
      <place id="mid"/>
      <place id="end"/>
      <transition id="t1"><name><text>Register</text></name></transition>
      <transition id="t2">
        <name><text>skip</text></name>
        <toolspecific tool="ProM" version="6.4" activity="$invisible$"/>
      </transition>
      <transition id="t3"><name><text></text></name></transition>
      <transition id="t4"/>
      <arc id="a1" source="start" target="t1"/>
      <arc id="a2" source="t1" target="mid"/>
      <arc id="a3" source="mid" target="t2"/>
      <arc id="a4" source="t2" target="end"/>
      <arc id="a5" source="mid" target="t3"/>
      <arc id="a6" source="t3" target="end"/>
      <arc id="a7" source="mid" target="t4"/>
      <arc id="a8" source="t4" target="end"/>
    </page>
  </net>
</pnml>"#;

    #[test]
    fn parses_places_transitions_and_silent_markers() {
        let model = parse_pnml_str(SIMPLE).unwrap();
        let net = &model.net;
        assert_eq!(net.places(), &["start", "mid", "end"]);
        let labels: Vec<Option<&str>> = net.transitions().iter().map(|t| t.label.as_deref()).collect();
        assert_eq!(labels, vec![Some("Register"), None, None, None]);
        assert_eq!(model.initial, 0);
        assert_eq!(model.final_place, 2);
    }

    #[test]
    fn defaults_to_source_and_sink_places() {
        let text = SIMPLE.replace("<initialMarking><text>1</text></initialMarking>", "");
        let model = parse_pnml_str(&text).unwrap();
        assert_eq!((model.initial, model.final_place), (0, 2));
    }

    #[test]
    fn explicit_final_marking_overrides() {
        let text = SIMPLE.replace(
            "</net>",
            r#"</net><finalmarkings><marking><place idref="end"><text>1</text></place></marking></finalmarkings>"#,
        );
        let model = parse_pnml_str(&text).unwrap();
        assert_eq!(model.final_place, 2);
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_pnml_str("<pnml></pnml>"), Err(PnmlError::NoNet)));
        assert!(matches!(
            parse_pnml_str("<pnml><net><place/></net></pnml>"),
            Err(PnmlError::MissingAttribute { element: "place", attribute: "id" })
        ));
        assert!(matches!(
            parse_pnml_str(r#"<pnml><net><place id="a"/><arc source="a" target="zz"/></net></pnml>"#),
            Err(PnmlError::Net(NetError::UnknownNode(_)))
        ));
        assert!(matches!(
            parse_pnml_str(r#"<pnml><net><place id="a"/></pnml>"#),
            Err(PnmlError::MalformedXml { .. })
        ));
    }
}
