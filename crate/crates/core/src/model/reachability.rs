use std::collections::{HashMap, HashSet, VecDeque};

use thiserror::Error;

use super::net::{FiringError, Marking, TransitionId, WorkflowNet};
use crate::fsm::{Fsm, NodeId};
use crate::Label;

pub const DEFAULT_STATE_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReachabilityError {
    #[error(transparent)]
    Firing(#[from] FiringError),
    #[error("reachability graph exceeds the cap of {0} nodes and arcs")]
    StateSpaceCap(usize),
}

/// Reachability graph before silent-arc removal. Arc labels are `None` for τ.
#[derive(Debug, Clone)]
pub struct RawReachabilityGraph {
    pub fsm: Fsm<Option<Label>>,
    pub markings: Vec<Marking>,
    /// The transition fired by each arc, when built from a net.
    pub fired: Vec<Option<TransitionId>>,
}

/// A τ-free reachability graph whose nodes are markings.
#[derive(Debug, Clone)]
pub struct ReachabilityGraph {
    fsm: Fsm<Label>,
    markings: Vec<Marking>,
}

impl ReachabilityGraph {
    pub fn fsm(&self) -> &Fsm<Label> {
        &self.fsm
    }

    pub fn marking(&self, node: NodeId) -> &Marking {
        &self.markings[node]
    }

    /// Number of nodes plus arcs.
    pub fn size(&self) -> usize {
        self.fsm.node_count() + self.fsm.arc_count()
    }
}

/// Explores all markings reachable from `{i}`, firing transitions in sorted id
/// order so node numbering follows discovery order deterministically.
pub fn explore(net: &WorkflowNet, cap: usize) -> Result<RawReachabilityGraph, ReachabilityError> {
    let initial = net.initial_marking();
    let mut index: HashMap<Marking, NodeId> = HashMap::from([(initial.clone(), 0)]);
    let mut markings = vec![initial];
    let mut edges: Vec<(NodeId, TransitionId, NodeId)> = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(node) = queue.pop_front() {
        let current = markings[node].clone();
        for t in net.enabled(&current) {
            let next = net.fire(&current, t)?;
            let target = match index.get(&next) {
                Some(&id) => id,
                None => {
                    let id = markings.len();
                    index.insert(next.clone(), id);
                    markings.push(next);
                    queue.push_back(id);
                    id
                }
            };
            edges.push((node, t, target));
            if markings.len() + edges.len() > cap {
                return Err(ReachabilityError::StateSpaceCap(cap));
            }
        }
    }

    let mut fsm = Fsm::new(markings.len(), 0);
    let o = net.final_place();
    for (n, m) in markings.iter().enumerate() {
        fsm.set_final(n, m.contains(o));
    }
    let transitions = net.net().transitions();
    let mut fired = Vec::with_capacity(edges.len());
    for (s, t, d) in edges {
        fsm.add_arc(s, transitions[t].label.clone(), d);
        fired.push(Some(t));
    }
    Ok(RawReachabilityGraph { fsm, markings, fired })
}

pub fn build_reachability_graph(
    net: &WorkflowNet,
    cap: usize,
) -> Result<ReachabilityGraph, ReachabilityError> {
    Ok(remove_tau_arcs(&explore(net, cap)?))
}

/// Replaces τ-paths by their observable continuations.
///
/// For every node `n` and every `n'` reachable from `n` through one or more
/// τ-arcs, each observable arc `(n', l, n'')` is copied to `(n, l, n'')`, and
/// `n` becomes final if `n'` is. τ-arcs and nodes no longer reachable from
/// the source are then dropped; surviving nodes keep their relative order.
pub fn remove_tau_arcs(raw: &RawReachabilityGraph) -> ReachabilityGraph {
    let g = &raw.fsm;
    let n = g.node_count();

    let tau_closure = |start: NodeId| -> Vec<NodeId> {
        let mut seen = HashSet::new();
        let mut queue = VecDeque::from([start]);
        let mut out = Vec::new();
        while let Some(v) = queue.pop_front() {
            for (_, arc) in g.outgoing(v) {
                if arc.label.is_none() && seen.insert(arc.target) {
                    out.push(arc.target);
                    queue.push_back(arc.target);
                }
            }
        }
        out.sort_unstable();
        out
    };

    let mut arcs: Vec<Vec<(Label, NodeId)>> = vec![Vec::new(); n];
    let mut finals = vec![false; n];
    for (v, (v_arcs, v_final)) in arcs.iter_mut().zip(finals.iter_mut()).enumerate() {
        let closure = tau_closure(v);
        *v_final = g.is_final(v) || closure.iter().any(|&w| g.is_final(w));
        let mut seen: HashSet<(Label, NodeId)> = HashSet::new();
        for w in std::iter::once(v).chain(closure) {
            for (_, arc) in g.outgoing(w) {
                if let Some(label) = &arc.label {
                    let key = (label.clone(), arc.target);
                    if seen.insert(key.clone()) {
                        v_arcs.push(key);
                    }
                }
            }
        }
    }

    // Keep only nodes reachable from the source over observable arcs.
    let mut keep = vec![false; n];
    keep[g.source()] = true;
    let mut queue = VecDeque::from([g.source()]);
    while let Some(v) = queue.pop_front() {
        for (_, w) in &arcs[v] {
            if !keep[*w] {
                keep[*w] = true;
                queue.push_back(*w);
            }
        }
    }
    let mut renumber = vec![usize::MAX; n];
    let mut markings = Vec::new();
    for v in 0..n {
        if keep[v] {
            renumber[v] = markings.len();
            markings.push(raw.markings.get(v).cloned().unwrap_or_default());
        }
    }
    let mut fsm = Fsm::new(markings.len(), renumber[g.source()]);
    for v in (0..n).filter(|&v| keep[v]) {
        fsm.set_final(renumber[v], finals[v]);
        for (label, w) in &arcs[v] {
            fsm.add_arc(renumber[v], label.clone(), renumber[*w]);
        }
    }
    ReachabilityGraph { fsm, markings }
}
