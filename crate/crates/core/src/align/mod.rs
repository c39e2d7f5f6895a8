//! Alignments between traces and the reachability graph, their cost
//! functions, and the search that computes them.

mod binary;
mod search;

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::fsm::ArcId;
use crate::tandem::ReducedTrace;
use crate::Label;

pub use binary::{binary_search_align, group_members, AlignmentTable};
pub use search::{align_dijkstra, align_optimal, AlignError, Aligner, DEFAULT_EXPANSION_CAP};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Op {
    /// Match: the trace label and a model step agree.
    MT,
    /// Log hide: the trace label has no model counterpart.
    LH,
    /// Model hide: a model step without trace counterpart.
    RH,
}

impl fmt::Display for Op {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Op::MT => "MT",
            Op::LH => "LH",
            Op::RH => "RH",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Synchronization {
    pub op: Op,
    pub dafsa_arc: Option<ArcId>,
    pub rg_arc: Option<ArcId>,
    pub label: Label,
}

impl Synchronization {
    pub fn mt(dafsa_arc: ArcId, rg_arc: ArcId, label: Label) -> Self {
        Synchronization { op: Op::MT, dafsa_arc: Some(dafsa_arc), rg_arc: Some(rg_arc), label }
    }

    pub fn lh(dafsa_arc: Option<ArcId>, label: Label) -> Self {
        Synchronization { op: Op::LH, dafsa_arc, rg_arc: None, label }
    }

    pub fn rh(rg_arc: ArcId, label: Label) -> Self {
        Synchronization { op: Op::RH, dafsa_arc: None, rg_arc: Some(rg_arc), label }
    }

    /// True if the synchronization consumes a trace label.
    pub fn on_trace(&self) -> bool {
        self.op != Op::RH
    }

    pub fn on_model(&self) -> bool {
        self.op != Op::LH
    }
}

impl fmt::Display for Synchronization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({})", self.op, self.label)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Alignment {
    syncs: Vec<Synchronization>,
}

impl Alignment {
    pub fn new(syncs: Vec<Synchronization>) -> Self {
        Alignment { syncs }
    }

    pub fn syncs(&self) -> &[Synchronization] {
        &self.syncs
    }

    pub fn into_syncs(self) -> Vec<Synchronization> {
        self.syncs
    }

    pub fn len(&self) -> usize {
        self.syncs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.syncs.is_empty()
    }

    /// `ε[i]` for `1 ≤ i ≤ |ε|`.
    pub fn at(&self, i: usize) -> &Synchronization {
        &self.syncs[i - 1]
    }

    /// Labels of the synchronizations that consume a trace label.
    pub fn trace_labels(&self) -> Vec<Label> {
        self.syncs.iter().filter(|s| s.on_trace()).map(|s| s.label.clone()).collect()
    }

    /// Reachability-graph arcs in order.
    pub fn rg_arcs(&self) -> Vec<ArcId> {
        self.syncs.iter().filter_map(|s| s.rg_arc).collect()
    }

    /// Equality on (operation, label, graph arc) triples.
    pub fn same_synchronizations(&self, other: &Alignment) -> bool {
        self.syncs.len() == other.syncs.len()
            && self
                .syncs
                .iter()
                .zip(&other.syncs)
                .all(|(a, b)| a.op == b.op && a.label == b.label && a.rg_arc == b.rg_arc)
    }

    /// `MT(A),LH(B),RH(C)` notation.
    pub fn render(&self) -> String {
        self.syncs.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
    }
}

impl fmt::Display for Alignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Number of synchronizations other than MT.
pub fn standard_cost(e: &Alignment) -> usize {
    e.syncs.iter().filter(|s| s.op != Op::MT).count()
}

/// `pos_t(ε, i)`: trace labels consumed by the first `i` synchronizations.
pub fn pos_t(e: &Alignment, i: usize) -> usize {
    e.syncs[..i].iter().filter(|s| s.on_trace()).count()
}

/// `pos_ε(ε, j)`: the smallest index `i` with `pos_t(ε, i) = j`.
pub fn pos_eps(e: &Alignment, j: usize) -> Option<usize> {
    if j == 0 {
        return Some(0);
    }
    let mut seen = 0;
    for (i, s) in e.syncs.iter().enumerate() {
        if s.on_trace() {
            seen += 1;
            if seen == j {
                return Some(i + 1);
            }
        }
    }
    None
}

/// `pos_t` for every prefix length `0..=|ε|`.
pub fn trace_positions(e: &Alignment) -> Vec<usize> {
    let mut out = Vec::with_capacity(e.len() + 1);
    out.push(0);
    let mut n = 0;
    for s in &e.syncs {
        n += s.on_trace() as usize;
        out.push(n);
    }
    out
}

/// `pos_ε` for trace positions `0..=pos_t(ε, |ε|)`.
pub fn alignment_positions(e: &Alignment) -> Vec<usize> {
    let mut out = vec![0];
    for (i, s) in e.syncs.iter().enumerate() {
        if s.on_trace() {
            out.push(i + 1);
        }
    }
    out
}

/// Repetition and complement data the reduced cost depends on.
#[derive(Debug, Clone, Copy)]
pub struct CostContext<'a> {
    pub p: &'a [usize],
    pub complement: &'a BTreeMap<usize, usize>,
}

impl<'a> CostContext<'a> {
    pub fn of(t: &'a ReducedTrace) -> Self {
        CostContext { p: t.p_values(), complement: t.complement_map() }
    }

    /// `p(q)`, zero outside the trace.
    pub fn p(&self, q: usize) -> usize {
        if q == 0 {
            0
        } else {
            self.p.get(q - 1).copied().unwrap_or(0)
        }
    }

    /// Cost of a hide at trace position `q`. `earlier_op` gives the operation
    /// that consumed an earlier trace position.
    /// True if hiding position `c` can still discount its complement once
    /// `consumed` positions have been read.
    pub(crate) fn awaits_discount(&self, c: usize, consumed: usize) -> bool {
        self.complement
            .get(&c)
            .is_some_and(|&q| c < q && c <= consumed && consumed < q && self.p(q) >= 1)
    }

    pub(crate) fn hide_cost(&self, op: Op, q: usize, earlier_op: impl FnOnce(usize) -> Op) -> usize {
        let p = self.p(q);
        if op == Op::LH && p >= 1 {
            if let Some(&c) = self.complement.get(&q) {
                if c < q && earlier_op(c) == Op::LH {
                    return 1;
                }
            }
        }
        1 + p
    }
}

/// One column of the reduced-cost breakdown.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CostRow {
    pub op: Op,
    pub label: Label,
    pub pos_t: usize,
    /// `TR_c(pos_t(ε, i))`, for synchronizations on the trace.
    pub trace_complement: Option<usize>,
    /// `pos_ε` of the trace complement.
    pub alignment_complement: Option<usize>,
    pub p: usize,
    pub f: usize,
}

/// The per-synchronization terms of the reduced cost.
pub fn cost_rows(e: &Alignment, ctx: CostContext<'_>) -> Vec<CostRow> {
    let pt = trace_positions(e);
    let pe = alignment_positions(e);
    e.syncs
        .iter()
        .enumerate()
        .map(|(idx, s)| {
            let q = pt[idx + 1];
            let trace_complement = if s.on_trace() { ctx.complement.get(&q).copied() } else { None };
            let f = match s.op {
                Op::MT => 0,
                op => ctx.hide_cost(op, q, |c| e.syncs[pe[c] - 1].op),
            };
            CostRow {
                op: s.op,
                label: s.label.clone(),
                pos_t: q,
                trace_complement,
                alignment_complement: trace_complement.and_then(|c| pe.get(c).copied()),
                p: ctx.p(q),
                f,
            }
        })
        .collect()
}

/// `ρ(ε, p, TR_c)`.
pub fn reduced_cost(e: &Alignment, ctx: CostContext<'_>) -> usize {
    cost_rows(e, ctx).iter().map(|r| r.f).sum()
}
