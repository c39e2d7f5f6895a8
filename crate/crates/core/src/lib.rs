//! Alignment-based conformance checking of event logs against workflow
//! nets, with tandem-repeat reduction of traces.

pub mod align;
pub mod extend;
pub mod fsm;
pub mod log;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod tandem;

pub type Label = std::sync::Arc<str>;
