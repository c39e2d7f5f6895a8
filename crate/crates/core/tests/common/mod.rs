//! Random corpora and brute-force oracles shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet, VecDeque};

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

use tandem_conformance::align::Op;
use tandem_conformance::fsm::Fsm;
use tandem_conformance::log::Trace;
use tandem_conformance::model::examples::build_net;
use tandem_conformance::model::{validate_workflow_net, ReachabilityGraph, WorkflowNet};
use tandem_conformance::tandem::ReducedTrace;
use tandem_conformance::Label;

pub const ALPHABET: [&str; 12] = ["A", "B", "C", "D", "E", "F", "G", "H", "I", "J", "K", "L"];

/// A random state-machine workflow net: a labelled chain from `i` to `o`
/// plus extra transitions (skips, back loops, silent steps). At most
/// `max_places` places; labels are unique.
pub fn random_net(rng: &mut StdRng, max_places: usize) -> WorkflowNet {
    let n = rng.gen_range(3..=max_places);
    let places: Vec<String> = (0..n)
        .map(|k| match k {
            0 => "i".to_string(),
            k if k == n - 1 => "o".to_string(),
            k => format!("p{k}"),
        })
        .collect();
    let mut labels = ALPHABET.to_vec();
    labels.shuffle(rng);
    let mut next_label = labels.into_iter();
    let mut transitions: Vec<(String, Option<&str>)> = Vec::new();
    let mut flow: Vec<(String, String)> = Vec::new();
    for k in 0..n - 1 {
        let id = format!("c{k}");
        transitions.push((id.clone(), next_label.next()));
        flow.push((places[k].clone(), id.clone()));
        flow.push((id, places[k + 1].clone()));
    }
    for k in 0..rng.gen_range(0..=4) {
        let from = rng.gen_range(0..n - 1);
        let to = rng.gen_range(1..n);
        let label = if rng.gen_bool(0.25) { None } else { next_label.next() };
        let id = format!("x{k}");
        transitions.push((id.clone(), label));
        flow.push((places[from].clone(), id.clone()));
        flow.push((id, places[to].clone()));
    }
    let p: Vec<&str> = places.iter().map(String::as_str).collect();
    let t: Vec<(&str, Option<&str>)> = transitions.iter().map(|(id, l)| (id.as_str(), *l)).collect();
    let f: Vec<(&str, &str)> = flow.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
    validate_workflow_net(build_net(&p, &t, &f), 0, n - 1).expect("generated net is a workflow net")
}

/// A random accepted run of the graph, at most `max_len` labels long.
pub fn random_run(rng: &mut StdRng, rg: &ReachabilityGraph, max_len: usize) -> Vec<Label> {
    let fsm = rg.fsm();
    let mut node = fsm.source();
    let mut out = Vec::new();
    loop {
        if fsm.is_final(node) && (out.len() >= max_len || rng.gen_bool(0.3)) {
            return out;
        }
        let arcs: Vec<_> = fsm.outgoing(node).map(|(_, a)| a).collect();
        if arcs.is_empty() || out.len() >= 3 * max_len {
            return out;
        }
        let a = arcs[rng.gen_range(0..arcs.len())];
        out.push(a.label.clone());
        node = a.target;
    }
}

fn model_labels(rg: &ReachabilityGraph) -> Vec<Label> {
    let set: BTreeSet<Label> = rg.fsm().arcs().iter().map(|a| a.label.clone()).collect();
    set.into_iter().collect()
}

/// A model run, then random edits, then an injected repetition, truncated
/// to `max_len` labels and never empty.
pub fn random_trace(rng: &mut StdRng, rg: &ReachabilityGraph, max_len: usize) -> Trace {
    let mut labels = model_labels(rg);
    labels.push(Label::from("X"));
    let mut t = random_run(rng, rg, max_len);
    for _ in 0..rng.gen_range(0..=2) {
        match rng.gen_range(0..3) {
            0 if !t.is_empty() => {
                let k = rng.gen_range(0..t.len());
                t.remove(k);
            }
            1 => {
                let k = rng.gen_range(0..=t.len());
                t.insert(k, labels[rng.gen_range(0..labels.len())].clone());
            }
            _ if t.len() >= 2 => {
                let k = rng.gen_range(0..t.len() - 1);
                t.swap(k, k + 1);
            }
            _ => {}
        }
    }
    if t.is_empty() {
        t.push(labels[rng.gen_range(0..labels.len())].clone());
    }
    if rng.gen_bool(0.8) {
        let width = rng.gen_range(1..=3.min(t.len()));
        let at = rng.gen_range(0..=t.len() - width);
        let copies = rng.gen_range(1..=3);
        let unit: Vec<Label> = t[at..at + width].to_vec();
        for _ in 0..copies {
            t.splice(at..at, unit.iter().cloned());
        }
    }
    t.truncate(max_len);
    Trace::new(t)
}

/// Random trace over `alphabet` with repeated blocks, for round trips.
pub fn random_repetitive_trace(rng: &mut StdRng, alphabet: &[&str], max_len: usize) -> Trace {
    let mut t: Vec<Label> = Vec::new();
    while t.len() < max_len {
        let width = rng.gen_range(1..=4);
        let unit: Vec<Label> = (0..width).map(|_| Label::from(*alphabet.choose(rng).unwrap())).collect();
        for _ in 0..rng.gen_range(1..=5) {
            t.extend(unit.iter().cloned());
        }
    }
    t.truncate(rng.gen_range(1..=max_len));
    Trace::new(t)
}

/// The reduced cost computed straight from its definition: every index
/// recomputes `pos_t` and `pos_ε` by scanning the alignment.
pub fn definition_cost(ops: &[Op], p: &[usize], complement: &BTreeMap<usize, usize>) -> usize {
    let pos_t = |i: usize| ops[..i].iter().filter(|o| **o != Op::RH).count();
    let pos_eps = |j: usize| (1..=ops.len()).find(|&i| pos_t(i) == j);
    let p_at = |q: usize| if q == 0 { 0 } else { p.get(q - 1).copied().unwrap_or(0) };
    (1..=ops.len())
        .map(|i| {
            let op = ops[i - 1];
            let q = pos_t(i);
            if op == Op::MT {
                return 0;
            }
            if op == Op::LH && p_at(q) >= 1 {
                if let Some(&c) = complement.get(&q) {
                    if c < q && pos_eps(c).is_some_and(|k| ops[k - 1] == Op::LH) {
                        return 1;
                    }
                }
            }
            1 + p_at(q)
        })
        .sum()
}

/// Minimal cost over every proper alignment of `t` against `rg`, by
/// exhaustive branch and bound. `p` and `complement` select the cost
/// (empty for the standard cost).
pub fn brute_force_min_cost(
    t: &[Label],
    rg: &Fsm<Label>,
    p: &[usize],
    complement: &BTreeMap<usize, usize>,
) -> Option<usize> {
    struct Search<'a> {
        t: &'a [Label],
        rg: &'a Fsm<Label>,
        p: &'a [usize],
        complement: &'a BTreeMap<usize, usize>,
        bound: usize,
        best: Option<usize>,
        ops: Vec<Op>,
    }
    impl Search<'_> {
        fn go(&mut self, j: usize, node: usize) {
            let cost = definition_cost(&self.ops, self.p, self.complement);
            if cost >= self.best.unwrap_or(self.bound + 1) {
                return;
            }
            if j == self.t.len() && self.rg.is_final(node) {
                self.best = Some(cost);
            }
            if j < self.t.len() {
                let label = self.t[j].clone();
                let matching: Vec<usize> =
                    self.rg.outgoing(node).filter(|(_, a)| a.label == label).map(|(_, a)| a.target).collect();
                for target in matching {
                    self.ops.push(Op::MT);
                    self.go(j + 1, target);
                    self.ops.pop();
                }
                self.ops.push(Op::LH);
                self.go(j + 1, node);
                self.ops.pop();
            }
            let targets: Vec<usize> = self.rg.outgoing(node).map(|(_, a)| a.target).collect();
            for target in targets {
                self.ops.push(Op::RH);
                self.go(j, target);
                self.ops.pop();
            }
        }
    }
    // A first bound: hide the whole trace, then walk a shortest model run.
    let shortest = rg.shortest_accepting_length()?;
    let mut ops = vec![Op::LH; t.len()];
    ops.extend(std::iter::repeat_n(Op::RH, shortest));
    let bound = definition_cost(&ops, p, complement);
    let mut s = Search { t, rg, p, complement, bound, best: None, ops: Vec::new() };
    s.go(0, rg.source());
    s.best
}

pub fn brute_force_reduced(r: &ReducedTrace, rg: &ReachabilityGraph) -> Option<usize> {
    brute_force_min_cost(r.labels(), rg.fsm(), r.p_values(), r.complement_map())
}

pub fn brute_force_standard(t: &[Label], rg: &ReachabilityGraph) -> Option<usize> {
    brute_force_min_cost(t, rg.fsm(), &[], &BTreeMap::new())
}

/// Accepted label sequences of length at most `max_len`, following silent
/// (`None`) arcs freely.
pub fn language<L: Clone>(fsm: &Fsm<L>, label: impl Fn(&L) -> Option<Label>, max_len: usize) -> BTreeSet<Vec<Label>> {
    let mut seen: HashSet<(usize, Vec<Label>)> = HashSet::new();
    let mut queue = VecDeque::from([(fsm.source(), Vec::new())]);
    let mut out = BTreeSet::new();
    while let Some((n, w)) = queue.pop_front() {
        if !seen.insert((n, w.clone())) {
            continue;
        }
        if fsm.is_final(n) {
            out.insert(w.clone());
        }
        for (_, a) in fsm.outgoing(n) {
            match label(&a.label) {
                None => queue.push_back((a.target, w.clone())),
                Some(l) if w.len() < max_len => {
                    let mut w2 = w.clone();
                    w2.push(l);
                    queue.push_back((a.target, w2));
                }
                Some(_) => {}
            }
        }
    }
    out
}
