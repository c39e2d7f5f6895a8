//! Finite state machines shared by the model side (reachability graph) and
//! the log side (DAFSA).

use std::collections::VecDeque;

pub type NodeId = usize;
pub type ArcId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FsmArc<L> {
    pub source: NodeId,
    pub label: L,
    pub target: NodeId,
}

/// A labelled FSM `(N, A, s, R)` with arcs indexed by insertion order.
///
/// Outgoing arcs of a node are kept in insertion order, which fixes the
/// iteration order of every traversal built on top of this type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Fsm<L> {
    arcs: Vec<FsmArc<L>>,
    outgoing: Vec<Vec<ArcId>>,
    finals: Vec<bool>,
    source: NodeId,
}

impl<L> Fsm<L> {
    /// Creates an FSM with `node_count` nodes and no arcs.
    pub fn new(node_count: usize, source: NodeId) -> Self {
        assert!(source < node_count, "source node out of range");
        Fsm {
            arcs: Vec::new(),
            outgoing: vec![Vec::new(); node_count],
            finals: vec![false; node_count],
            source,
        }
    }

    pub fn add_node(&mut self) -> NodeId {
        self.outgoing.push(Vec::new());
        self.finals.push(false);
        self.outgoing.len() - 1
    }

    pub fn add_arc(&mut self, source: NodeId, label: L, target: NodeId) -> ArcId {
        assert!(source < self.node_count() && target < self.node_count());
        let id = self.arcs.len();
        self.arcs.push(FsmArc { source, label, target });
        self.outgoing[source].push(id);
        id
    }

    pub fn set_final(&mut self, node: NodeId, is_final: bool) {
        self.finals[node] = is_final;
    }

    pub fn node_count(&self) -> usize {
        self.outgoing.len()
    }

    pub fn arc_count(&self) -> usize {
        self.arcs.len()
    }

    pub fn source(&self) -> NodeId {
        self.source
    }

    pub fn is_final(&self, node: NodeId) -> bool {
        self.finals[node]
    }

    pub fn final_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.finals.iter().enumerate().filter(|(_, f)| **f).map(|(n, _)| n)
    }

    pub fn arc(&self, id: ArcId) -> &FsmArc<L> {
        &self.arcs[id]
    }

    pub fn arcs(&self) -> &[FsmArc<L>] {
        &self.arcs
    }

    /// `n ▶`: the outgoing arcs of `node`.
    pub fn outgoing(&self, node: NodeId) -> impl Iterator<Item = (ArcId, &FsmArc<L>)> + '_ {
        self.outgoing[node].iter().map(move |&id| (id, &self.arcs[id]))
    }

    /// Nodes reachable from the source, in BFS order.
    pub fn reachable_from_source(&self) -> Vec<bool> {
        let mut seen = vec![false; self.node_count()];
        let mut queue = VecDeque::from([self.source]);
        seen[self.source] = true;
        while let Some(n) = queue.pop_front() {
            for (_, arc) in self.outgoing(n) {
                if !seen[arc.target] {
                    seen[arc.target] = true;
                    queue.push_back(arc.target);
                }
            }
        }
        seen
    }

    /// Length of the shortest source-to-final path, if any final node is reachable.
    pub fn shortest_accepting_length(&self) -> Option<usize> {
        let mut dist = vec![usize::MAX; self.node_count()];
        let mut queue = VecDeque::from([self.source]);
        dist[self.source] = 0;
        while let Some(n) = queue.pop_front() {
            if self.finals[n] {
                return Some(dist[n]);
            }
            for (_, arc) in self.outgoing(n) {
                if dist[arc.target] == usize::MAX {
                    dist[arc.target] = dist[n] + 1;
                    queue.push_back(arc.target);
                }
            }
        }
        None
    }
}

impl<L: PartialEq> Fsm<L> {
    /// Follows the unique arc path spelling `word`, as used for deterministic
    /// automata. Returns the node reached, or `None` if some step is missing.
    pub fn walk<'a, I>(&self, word: I) -> Option<NodeId>
    where
        I: IntoIterator<Item = &'a L>,
        L: 'a,
    {
        let mut node = self.source;
        for label in word {
            node = self.outgoing(node).find(|(_, a)| &a.label == label)?.1.target;
        }
        Some(node)
    }

    pub fn accepts<'a, I>(&self, word: I) -> bool
    where
        I: IntoIterator<Item = &'a L>,
        L: 'a,
    {
        self.walk(word).is_some_and(|n| self.finals[n])
    }

    /// True if no node has two outgoing arcs with the same label.
    pub fn is_deterministic(&self) -> bool {
        (0..self.node_count()).all(|n| {
            let labels: Vec<&L> = self.outgoing(n).map(|(_, a)| &a.label).collect();
            labels
                .iter()
                .enumerate()
                .all(|(i, l)| !labels[..i].contains(l))
        })
    }

    /// True if the arc relation admits a topological order.
    pub fn is_acyclic(&self) -> bool {
        let mut indegree = vec![0usize; self.node_count()];
        for arc in &self.arcs {
            indegree[arc.target] += 1;
        }
        let mut ready: Vec<NodeId> = (0..self.node_count()).filter(|&n| indegree[n] == 0).collect();
        let mut visited = 0;
        while let Some(n) = ready.pop() {
            visited += 1;
            for (_, arc) in self.outgoing(n) {
                indegree[arc.target] -= 1;
                if indegree[arc.target] == 0 {
                    ready.push(arc.target);
                }
            }
        }
        visited == self.node_count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path() -> Fsm<char> {
        let mut fsm = Fsm::new(3, 0);
        fsm.add_arc(0, 'a', 1);
        fsm.add_arc(1, 'b', 2);
        fsm.set_final(2, true);
        fsm
    }

    #[test]
    fn walk_and_accept() {
        let fsm = path();
        assert_eq!(fsm.walk(&['a']), Some(1));
        assert!(fsm.accepts(&['a', 'b']));
        assert!(!fsm.accepts(&['a']));
        assert!(!fsm.accepts(&['b']));
        assert_eq!(fsm.shortest_accepting_length(), Some(2));
    }

    #[test]
    fn structural_checks() {
        let mut fsm = path();
        assert!(fsm.is_deterministic());
        assert!(fsm.is_acyclic());
        fsm.add_arc(2, 'a', 0);
        assert!(!fsm.is_acyclic());
        fsm.add_arc(0, 'a', 2);
        assert!(!fsm.is_deterministic());
    }
}
