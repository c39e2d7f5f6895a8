use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::Label;

pub type PlaceId = usize;
pub type TransitionId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub id: String,
    /// `None` is the silent label τ.
    pub label: Option<Label>,
}

impl Transition {
    pub fn is_silent(&self) -> bool {
        self.label.is_none()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NetError {
    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),
    #[error("unknown node `{0}` referenced by flow")]
    UnknownNode(String),
    #[error("flow `{0}` -> `{1}` does not connect a place and a transition")]
    NotBipartite(String, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeRef {
    Place(PlaceId),
    Transition(TransitionId),
}

/// A labelled Petri net `(P, T, F, λ)`.
///
/// Flow is stored as per-transition presets and postsets; place-side
/// adjacency is derived on construction of each flow pair.
#[derive(Debug, Clone, Default)]
pub struct PetriNet {
    places: Vec<String>,
    transitions: Vec<Transition>,
    t_preset: Vec<BTreeSet<PlaceId>>,
    t_postset: Vec<BTreeSet<PlaceId>>,
    p_preset: Vec<BTreeSet<TransitionId>>,
    p_postset: Vec<BTreeSet<TransitionId>>,
    index: HashMap<String, NodeRef>,
}

impl PetriNet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_place(&mut self, id: impl Into<String>) -> Result<PlaceId, NetError> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(NetError::DuplicateNode(id));
        }
        let pid = self.places.len();
        self.index.insert(id.clone(), NodeRef::Place(pid));
        self.places.push(id);
        self.p_preset.push(BTreeSet::new());
        self.p_postset.push(BTreeSet::new());
        Ok(pid)
    }

    pub fn add_transition(
        &mut self,
        id: impl Into<String>,
        label: Option<&str>,
    ) -> Result<TransitionId, NetError> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(NetError::DuplicateNode(id));
        }
        let tid = self.transitions.len();
        self.index.insert(id.clone(), NodeRef::Transition(tid));
        self.transitions.push(Transition { id, label: label.map(Label::from) });
        self.t_preset.push(BTreeSet::new());
        self.t_postset.push(BTreeSet::new());
        Ok(tid)
    }

    /// Adds a flow pair between two existing nodes, one place and one transition.
    pub fn add_flow(&mut self, from: &str, to: &str) -> Result<(), NetError> {
        let a = *self.index.get(from).ok_or_else(|| NetError::UnknownNode(from.to_string()))?;
        let b = *self.index.get(to).ok_or_else(|| NetError::UnknownNode(to.to_string()))?;
        match (a, b) {
            (NodeRef::Place(p), NodeRef::Transition(t)) => {
                self.t_preset[t].insert(p);
                self.p_postset[p].insert(t);
            }
            (NodeRef::Transition(t), NodeRef::Place(p)) => {
                self.t_postset[t].insert(p);
                self.p_preset[p].insert(t);
            }
            _ => return Err(NetError::NotBipartite(from.to_string(), to.to_string())),
        }
        Ok(())
    }

    pub fn places(&self) -> &[String] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place_id(&self, id: &str) -> Option<PlaceId> {
        match self.index.get(id) {
            Some(NodeRef::Place(p)) => Some(*p),
            _ => None,
        }
    }

    pub fn transition_id(&self, id: &str) -> Option<TransitionId> {
        match self.index.get(id) {
            Some(NodeRef::Transition(t)) => Some(*t),
            _ => None,
        }
    }

    pub fn preset(&self, t: TransitionId) -> &BTreeSet<PlaceId> {
        &self.t_preset[t]
    }

    pub fn postset(&self, t: TransitionId) -> &BTreeSet<PlaceId> {
        &self.t_postset[t]
    }

    pub fn place_preset(&self, p: PlaceId) -> &BTreeSet<TransitionId> {
        &self.p_preset[p]
    }

    pub fn place_postset(&self, p: PlaceId) -> &BTreeSet<TransitionId> {
        &self.p_postset[p]
    }

    /// Transition indices sorted by transition id, the canonical firing order.
    pub fn sorted_transitions(&self) -> Vec<TransitionId> {
        let mut order: Vec<TransitionId> = (0..self.transitions.len()).collect();
        order.sort_by(|&a, &b| self.transitions[a].id.cmp(&self.transitions[b].id));
        order
    }
}

/// A 1-bounded marking, stored as the set of marked places.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Marking(BTreeSet<PlaceId>);

impl Marking {
    pub fn new() -> Self {
        Marking(BTreeSet::new())
    }

    pub fn contains(&self, p: PlaceId) -> bool {
        self.0.contains(&p)
    }

    pub fn places(&self) -> impl Iterator<Item = PlaceId> + '_ {
        self.0.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }
}

impl FromIterator<PlaceId> for Marking {
    fn from_iter<I: IntoIterator<Item = PlaceId>>(iter: I) -> Self {
        Marking(iter.into_iter().collect())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("label `{label}` is shared by transitions `{first}` and `{second}`")]
    DuplicateLabel { label: String, first: String, second: String },
    #[error("place `{0}` violates the free-choice property")]
    NotFreeChoice(String),
    #[error("not a workflow net: {0}")]
    NotWorkflow(String),
}

/// Every violated workflow-net property found by [`validate_workflow_net`].
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid workflow net")?;
        for v in &self.violations {
            write!(f, "; {v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FiringError {
    #[error("transition `{0}` is not enabled")]
    NotEnabled(String),
    #[error("firing would put a second token on place `{0}`")]
    BoundViolation(String),
}

/// A uniquely-labelled, free-choice workflow net with initial place `i` and
/// final place `o`. Only obtainable through [`validate_workflow_net`].
#[derive(Debug, Clone)]
pub struct WorkflowNet {
    net: PetriNet,
    initial: PlaceId,
    final_place: PlaceId,
    firing_order: Vec<TransitionId>,
}

pub fn validate_workflow_net(
    net: PetriNet,
    initial: PlaceId,
    final_place: PlaceId,
) -> Result<WorkflowNet, ValidationReport> {
    let mut violations = Vec::new();
    let np = net.places.len();
    if initial >= np || final_place >= np {
        violations.push(Violation::NotWorkflow("initial or final place out of range".into()));
        return Err(ValidationReport { violations });
    }
    let (i_name, o_name) = (&net.places[initial], &net.places[final_place]);
    if initial == final_place {
        violations.push(Violation::NotWorkflow(format!(
            "initial and final place coincide (`{i_name}`)"
        )));
    }
    if !net.p_preset[initial].is_empty() {
        violations.push(Violation::NotWorkflow(format!("initial place `{i_name}` has a non-empty preset")));
    }
    if !net.p_postset[final_place].is_empty() {
        violations.push(Violation::NotWorkflow(format!("final place `{o_name}` has a non-empty postset")));
    }
    if let Some(node) = first_not_strongly_connected(&net, initial, final_place) {
        violations.push(Violation::NotWorkflow(format!(
            "node `{node}` is not on a path from `{i_name}` to `{o_name}`"
        )));
    }

    let mut seen: HashMap<&str, TransitionId> = HashMap::new();
    for t in net.sorted_transitions() {
        if let Some(label) = &net.transitions[t].label {
            if let Some(&other) = seen.get(label.as_ref()) {
                violations.push(Violation::DuplicateLabel {
                    label: label.to_string(),
                    first: net.transitions[other].id.clone(),
                    second: net.transitions[t].id.clone(),
                });
            } else {
                seen.insert(label, t);
            }
        }
    }

    for p in 0..np {
        let consumers = &net.p_postset[p];
        if consumers.len() > 1 && consumers.iter().any(|&t| net.t_preset[t].len() != 1) {
            violations.push(Violation::NotFreeChoice(net.places[p].clone()));
        }
    }

    if violations.is_empty() {
        let firing_order = net.sorted_transitions();
        Ok(WorkflowNet { net, initial, final_place, firing_order })
    } else {
        Err(ValidationReport { violations })
    }
}

/// Returns a node that is not both reachable from `i` and co-reachable to
/// `o`, which is equivalent to strong connectedness once `o → i` is added.
fn first_not_strongly_connected(net: &PetriNet, i: PlaceId, o: PlaceId) -> Option<String> {
    // Node numbering: places first, then transitions.
    let np = net.places.len();
    let n = np + net.transitions.len();
    let forward = |v: usize| -> Vec<usize> {
        if v < np {
            net.p_postset[v].iter().map(|t| np + t).collect()
        } else {
            net.t_postset[v - np].iter().copied().collect()
        }
    };
    let backward = |v: usize| -> Vec<usize> {
        if v < np {
            net.p_preset[v].iter().map(|t| np + t).collect()
        } else {
            net.t_preset[v - np].iter().copied().collect()
        }
    };
    let bfs = |start: usize, next: &dyn Fn(usize) -> Vec<usize>| {
        let mut seen = vec![false; n];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for w in next(v) {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        seen
    };
    let from_i = bfs(i, &forward);
    let to_o = bfs(o, &backward);
    (0..n).find(|&v| !(from_i[v] && to_o[v])).map(|v| {
        if v < np {
            net.places[v].clone()
        } else {
            net.transitions[v - np].id.clone()
        }
    })
}

impl WorkflowNet {
    pub fn net(&self) -> &PetriNet {
        &self.net
    }

    pub fn initial_place(&self) -> PlaceId {
        self.initial
    }

    pub fn final_place(&self) -> PlaceId {
        self.final_place
    }

    pub fn initial_marking(&self) -> Marking {
        Marking([self.initial].into())
    }

    /// Transitions in canonical (sorted id) order.
    pub fn firing_order(&self) -> &[TransitionId] {
        &self.firing_order
    }

    /// `{t | •t ⊆ m}`, in canonical order.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        self.firing_order
            .iter()
            .copied()
            .filter(|&t| self.net.t_preset[t].iter().all(|p| m.contains(*p)))
            .collect()
    }

    /// `m ∖ •t ∪ t•`, rejecting markings that would exceed one token per place.
    pub fn fire(&self, m: &Marking, t: TransitionId) -> Result<Marking, FiringError> {
        let preset = &self.net.t_preset[t];
        if !preset.iter().all(|p| m.contains(*p)) {
            return Err(FiringError::NotEnabled(self.net.transitions[t].id.clone()));
        }
        let mut next: BTreeSet<PlaceId> = m.0.difference(preset).copied().collect();
        for &p in &self.net.t_postset[t] {
            if !next.insert(p) {
                return Err(FiringError::BoundViolation(self.net.places[p].clone()));
            }
        }
        Ok(Marking(next))
    }

    /// A transition whose preset or postset has more than one place, i.e. an
    /// AND-join or AND-split.
    pub fn detect_concurrency(&self) -> Option<TransitionId> {
        self.firing_order
            .iter()
            .copied()
            .find(|&t| self.net.t_preset[t].len() > 1 || self.net.t_postset[t].len() > 1)
    }
}
