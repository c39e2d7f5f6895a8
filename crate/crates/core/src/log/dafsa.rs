use std::collections::{HashMap, VecDeque};

use super::trace::Trace;
use crate::fsm::Fsm;
use crate::Label;

/// Deterministic acyclic automaton accepting exactly a set of traces.
#[derive(Debug, Clone)]
pub struct Dafsa {
    fsm: Fsm<Label>,
}

impl Dafsa {
    pub fn fsm(&self) -> &Fsm<Label> {
        &self.fsm
    }

    pub fn accepts(&self, trace: &[Label]) -> bool {
        self.fsm.accepts(trace)
    }
}

#[derive(Default)]
struct Builder {
    children: Vec<Vec<(Label, usize)>>,
    finals: Vec<bool>,
    registry: HashMap<(bool, Vec<(Label, usize)>), usize>,
    // (parent, child) along the most recently inserted word, not yet minimized.
    unchecked: Vec<(usize, usize)>,
}

impl Builder {
    fn new_node(&mut self) -> usize {
        self.children.push(Vec::new());
        self.finals.push(false);
        self.children.len() - 1
    }

    fn minimize(&mut self, down_to: usize) {
        while self.unchecked.len() > down_to {
            let (parent, child) = self.unchecked.pop().expect("non-empty");
            let key = (self.finals[child], self.children[child].clone());
            match self.registry.get(&key) {
                Some(&existing) => {
                    let slot = self.children[parent].last_mut().expect("child arc");
                    debug_assert_eq!(slot.1, child);
                    slot.1 = existing;
                }
                None => {
                    self.registry.insert(key, child);
                }
            }
        }
    }
}

/// Builds the minimal DAFSA of `traces` by incremental insertion in sorted
/// order with a registry of equivalent states.
///
/// Nodes are numbered breadth-first from the source with arcs in label
/// order, so the result depends only on the trace set.
pub fn build_dafsa<'a, I>(traces: I) -> Dafsa
where
    I: IntoIterator<Item = &'a Trace>,
{
    let mut words: Vec<&[Label]> = traces.into_iter().map(|t| t.labels()).collect();
    words.sort();
    words.dedup();

    let mut b = Builder::default();
    let root = b.new_node();
    let mut previous: &[Label] = &[];
    for word in words {
        let common = word.iter().zip(previous).take_while(|(a, b)| a == b).count();
        b.minimize(common);
        let mut node = b.unchecked.last().map_or(root, |&(_, c)| c);
        for label in &word[common..] {
            let next = b.new_node();
            b.children[node].push((label.clone(), next));
            b.unchecked.push((node, next));
            node = next;
        }
        b.finals[node] = true;
        previous = word;
    }
    b.minimize(0);

    let mut number = vec![usize::MAX; b.children.len()];
    let mut order = Vec::new();
    let mut queue = VecDeque::from([root]);
    number[root] = 0;
    while let Some(n) = queue.pop_front() {
        order.push(n);
        for (_, c) in &b.children[n] {
            if number[*c] == usize::MAX {
                number[*c] = order.len() + queue.len();
                queue.push_back(*c);
            }
        }
    }
    let mut fsm = Fsm::new(order.len(), 0);
    for &n in &order {
        fsm.set_final(number[n], b.finals[n]);
        for (label, c) in &b.children[n] {
            fsm.add_arc(number[n], label.clone(), number[*c]);
        }
    }
    Dafsa { fsm }
}
