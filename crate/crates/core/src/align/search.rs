use std::cmp::Reverse;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, BinaryHeap, HashMap};
use std::sync::atomic::{AtomicUsize, Ordering};

use thiserror::Error;

use super::{Alignment, CostContext, Op, Synchronization};
use crate::fsm::{Fsm, NodeId};
use crate::log::{Dafsa, Trace};
use crate::model::ReachabilityGraph;
use crate::tandem::ReducedTrace;
use crate::Label;

pub const DEFAULT_EXPANSION_CAP: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlignError {
    #[error("no alignment reaches a final state")]
    NoPath,
    #[error("search exceeded {0} state expansions")]
    CapExceeded(usize),
    #[error("trace {0} is not accepted by the log automaton")]
    TraceNotInDafsa(Trace),
}

/// Uniform-cost alignment search over a log automaton and a reachability
/// graph, counting calls and expanded states.
pub struct Aligner<'a> {
    dafsa: &'a Fsm<Label>,
    rg: &'a Fsm<Label>,
    expansion_cap: usize,
    calls: AtomicUsize,
    expansions: AtomicUsize,
}

struct Node {
    parent: Option<usize>,
    sync: Option<Synchronization>,
    n_d: NodeId,
    n_rg: NodeId,
    consumed: usize,
    len: usize,
    /// Hidden positions whose complement lies ahead and may still earn the
    /// discount; part of the closed-set key since they affect future costs.
    pending: Vec<usize>,
}

fn rank(op: Op) -> u8 {
    match op {
        Op::MT => 0,
        Op::LH => 1,
        Op::RH => 2,
    }
}

impl<'a> Aligner<'a> {
    pub fn new(dafsa: &'a Dafsa, rg: &'a ReachabilityGraph) -> Self {
        Aligner {
            dafsa: dafsa.fsm(),
            rg: rg.fsm(),
            expansion_cap: DEFAULT_EXPANSION_CAP,
            calls: AtomicUsize::new(0),
            expansions: AtomicUsize::new(0),
        }
    }

    pub fn with_expansion_cap(mut self, cap: usize) -> Self {
        self.expansion_cap = cap;
        self
    }

    /// Number of searches run so far.
    pub fn calls(&self) -> usize {
        self.calls.load(Ordering::Relaxed)
    }

    /// Total states expanded over all searches.
    pub fn expansions(&self) -> usize {
        self.expansions.load(Ordering::Relaxed)
    }

    /// A reduced alignment of `t`, minimal under the reduced cost.
    pub fn align_reduced(&self, t: &ReducedTrace) -> Result<Alignment, AlignError> {
        self.search(t.labels(), CostContext::of(t))
    }

    /// An alignment of `t` minimal under the standard cost.
    pub fn align_trace(&self, t: &Trace) -> Result<Alignment, AlignError> {
        let empty = BTreeMap::new();
        self.search(t, CostContext { p: &[], complement: &empty })
    }

    fn search(&self, t: &[Label], ctx: CostContext<'_>) -> Result<Alignment, AlignError> {
        self.calls.fetch_add(1, Ordering::Relaxed);
        if !self.dafsa.accepts(t) {
            return Err(AlignError::TraceNotInDafsa(Trace::new(t.to_vec())));
        }
        let (dafsa, rg) = (self.dafsa, self.rg);
        let mut arena = vec![Node {
            parent: None,
            sync: None,
            n_d: dafsa.source(),
            n_rg: rg.source(),
            consumed: 0,
            len: 0,
            pending: Vec::new(),
        }];
        // (ρ, length, last operation, insertion order, arena index)
        let mut open = BinaryHeap::from([Reverse((0usize, 0usize, 0u8, 0usize, 0usize))]);
        let mut closed: HashMap<(NodeId, NodeId, Vec<usize>), usize> = HashMap::new();
        let mut seq = 0usize;
        let mut expanded = 0usize;

        let result = loop {
            let Some(Reverse((rho, _, _, _, idx))) = open.pop() else {
                break Err(AlignError::NoPath);
            };
            let (n_d, n_rg, consumed, len) = {
                let n = &arena[idx];
                (n.n_d, n.n_rg, n.consumed, n.len)
            };
            let pending = arena[idx].pending.clone();
            match closed.entry((n_d, n_rg, pending.clone())) {
                Entry::Occupied(mut c) if *c.get() >= rho => {
                    c.insert(rho);
                }
                Entry::Occupied(_) => continue,
                Entry::Vacant(c) => {
                    c.insert(rho);
                }
            }
            if consumed == t.len() && dafsa.is_final(n_d) && rg.is_final(n_rg) {
                break Ok(rebuild(&arena, idx));
            }
            expanded += 1;
            if expanded > self.expansion_cap {
                break Err(AlignError::CapExceeded(self.expansion_cap));
            }

            let mut successors: Vec<(Synchronization, NodeId, NodeId, usize)> = Vec::new();
            if consumed < t.len() {
                let label = &t[consumed];
                let q = consumed + 1;
                if let Some((d_arc, d)) = dafsa.outgoing(n_d).find(|(_, a)| &a.label == label) {
                    let f = ctx.hide_cost(Op::LH, q, |c| if pending.contains(&c) { Op::LH } else { Op::MT });
                    successors.push((Synchronization::lh(Some(d_arc), label.clone()), d.target, n_rg, f));
                    for (r_arc, r) in rg.outgoing(n_rg).filter(|(_, a)| &a.label == label) {
                        successors.push((Synchronization::mt(d_arc, r_arc, label.clone()), d.target, r.target, 0));
                    }
                }
            }
            for (r_arc, r) in rg.outgoing(n_rg) {
                let f = ctx.hide_cost(Op::RH, consumed, |_| Op::RH);
                successors.push((Synchronization::rh(r_arc, r.label.clone()), n_d, r.target, f));
            }

            for (sync, d, r, f) in successors {
                let cost = rho + f;
                let op = sync.op;
                let next = consumed + sync.on_trace() as usize;
                let pending = if next == consumed {
                    pending.clone()
                } else {
                    let mut kept: Vec<usize> =
                        pending.iter().copied().filter(|&c| ctx.awaits_discount(c, next)).collect();
                    if op == Op::LH && ctx.awaits_discount(next, next) {
                        kept.push(next);
                    }
                    kept
                };
                let key = (d, r, pending);
                if closed.get(&key).is_some_and(|&c| c < cost) {
                    continue;
                }
                let (_, _, pending) = key;
                arena.push(Node {
                    parent: Some(idx),
                    consumed: next,
                    sync: Some(sync),
                    n_d: d,
                    n_rg: r,
                    len: len + 1,
                    pending,
                });
                seq += 1;
                open.push(Reverse((cost, len + 1, rank(op), seq, arena.len() - 1)));
            }
        };
        self.expansions.fetch_add(expanded, Ordering::Relaxed);
        result
    }
}

fn rebuild(arena: &[Node], mut idx: usize) -> Alignment {
    let mut syncs = Vec::with_capacity(arena[idx].len);
    while let Some(parent) = arena[idx].parent {
        syncs.push(arena[idx].sync.clone().expect("non-root node"));
        idx = parent;
    }
    syncs.reverse();
    Alignment::new(syncs)
}

/// Aligns a reduced trace with the reduced cost.
pub fn align_dijkstra(t: &ReducedTrace, dafsa: &Dafsa, rg: &ReachabilityGraph) -> Result<Alignment, AlignError> {
    Aligner::new(dafsa, rg).align_reduced(t)
}

/// Aligns an unreduced trace with the standard cost.
pub fn align_optimal(t: &Trace, dafsa: &Dafsa, rg: &ReachabilityGraph) -> Result<Alignment, AlignError> {
    Aligner::new(dafsa, rg).align_trace(t)
}
