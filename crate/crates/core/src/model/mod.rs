//! Petri-net model side: nets, markings, firing and reachability graphs.

pub mod examples;
pub mod net;
pub mod pnml;
pub mod reachability;

pub use net::{
    validate_workflow_net, FiringError, Marking, NetError, PetriNet, PlaceId, Transition,
    TransitionId, ValidationReport, Violation, WorkflowNet,
};
pub use pnml::{parse_pnml, parse_pnml_str, PnmlError, PnmlModel};
pub use reachability::{
    build_reachability_graph, explore, remove_tau_arcs, RawReachabilityGraph, ReachabilityError,
    ReachabilityGraph, DEFAULT_STATE_CAP,
};
