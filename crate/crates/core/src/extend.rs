//! Extension of reduced alignments back to alignments of the original
//! traces, and the check that an alignment is proper.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use thiserror::Error;

use crate::align::{alignment_positions, trace_positions, Alignment, Op, Synchronization};
use crate::fsm::ArcId;
use crate::model::ReachabilityGraph;
use crate::tandem::ReducedTrace;
use crate::Label;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtendError {
    #[error("complement map is inconsistent around trace position {0}")]
    InconsistentComplement(usize),
    #[error("alignment consumes {found} trace labels, the reduced trace has {expected}")]
    LengthMismatch { expected: usize, found: usize },
}

/// The alignment being extended with the repeats still to be expanded.
#[derive(Debug, Clone)]
pub struct ExtensionState {
    pub alignment: Vec<Synchronization>,
    pub complement: BTreeMap<usize, usize>,
    pub p: Vec<usize>,
    /// Alignment index of the scan, 1-based; 0 when done.
    pub i: usize,
}

/// Alignment index ranges (1-based, inclusive) of the two kept copies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CopyBounds {
    pub first: RangeInclusive<usize>,
    pub second: RangeInclusive<usize>,
}

impl ExtensionState {
    pub fn new(e: &Alignment, t: &ReducedTrace) -> Result<Self, ExtendError> {
        let found = e.syncs().iter().filter(|s| s.on_trace()).count();
        if found != t.len() {
            return Err(ExtendError::LengthMismatch { expected: t.len(), found });
        }
        Ok(ExtensionState {
            alignment: e.syncs().to_vec(),
            complement: t.complement_map().clone(),
            p: t.p_values().to_vec(),
            i: e.len(),
        })
    }

    fn p_at(&self, q: usize) -> usize {
        if q == 0 {
            0
        } else {
            self.p.get(q - 1).copied().unwrap_or(0)
        }
    }

    fn current(&self) -> Alignment {
        Alignment::new(self.alignment.clone())
    }

    /// The copies of the repeat whose last trace position is `pos_t(ε, i)`,
    /// or `None` if that position is not in a repeat.
    pub fn copy_bounds(&self, i: usize) -> Result<Option<CopyBounds>, ExtendError> {
        let e = self.current();
        let pt = trace_positions(&e);
        let pe = alignment_positions(&e);
        let q = pt[i];
        let Some(&c) = self.complement.get(&q) else {
            return Ok(None);
        };
        let bad = || ExtendError::InconsistentComplement(q);
        if c >= q {
            return Err(bad());
        }
        let m = q - c;
        let second_start = c + 1;
        let first_start = *self.complement.get(&second_start).ok_or_else(bad)?;
        if first_start + m != second_start {
            return Err(bad());
        }
        for x in first_start..second_start {
            if self.complement.get(&x) != Some(&(x + m)) || self.complement.get(&(x + m)) != Some(&x) {
                return Err(ExtendError::InconsistentComplement(x));
            }
        }
        let s1 = *pe.get(first_start).ok_or_else(bad)?;
        let s2 = *pe.get(second_start).ok_or_else(bad)?;
        Ok(Some(CopyBounds { first: s1..=s2 - 1, second: s2..=i }))
    }

    /// `TR_c(ε, k)`: the alignment index of the complement of index `k`.
    fn alignment_complement(&self, k: usize, pt: &[usize], pe: &[usize]) -> Option<usize> {
        self.complement.get(&pt[k]).and_then(|&c| pe.get(c).copied())
    }

    /// Leftmost index of the first copy that is a match whose complement is
    /// also a match.
    pub fn find_repeatable(&self, bounds: &CopyBounds) -> Option<usize> {
        let e = self.current();
        let pt = trace_positions(&e);
        let pe = alignment_positions(&e);
        bounds.first.clone().find(|&k| {
            e.at(k).op == Op::MT
                && self.alignment_complement(k, &pt, &pe).is_some_and(|c| e.at(c).op == Op::MT)
        })
    }

    /// The synchronizations inserted once per reduced repetition.
    pub fn build_middle_copy(&self, bounds: &CopyBounds, j: Option<usize>) -> Vec<Synchronization> {
        let e = &self.alignment;
        let (s1, s2) = (*bounds.first.start(), *bounds.second.start());
        match j {
            Some(j) => {
                let cur = self.current();
                let pt = trace_positions(&cur);
                let pe = alignment_positions(&cur);
                let cj = self.alignment_complement(j, &pt, &pe).expect("repeatable index has a complement");
                e[s2 - 1..cj].iter().chain(&e[j..s2 - 1]).cloned().collect()
            }
            None => e[s1 - 1..s2 - 1]
                .iter()
                .filter(|s| s.on_trace())
                .map(|s| Synchronization::lh(s.dafsa_arc, s.label.clone()))
                .collect(),
        }
    }

    /// One application of the extension at the scan index: expands the
    /// repeat ending there, or moves the scan one index left.
    pub fn step(&mut self) -> Result<(), ExtendError> {
        let i = self.i;
        let Some(bounds) = self.copy_bounds(i)? else {
            self.i -= 1;
            return Ok(());
        };
        let pt = trace_positions(&self.current());
        let q = pt[i];
        let reps = self.p_at(q);
        let j = self.find_repeatable(&bounds);
        let mid = self.build_middle_copy(&bounds, j);
        let s2 = *bounds.second.start();
        let insert: Vec<Synchronization> = (0..reps).flat_map(|_| mid.iter().cloned()).collect();
        self.alignment.splice(s2 - 1..s2 - 1, insert);

        let s1 = *bounds.first.start();
        let first_pos = pt[s1 - 1] + 1;
        for x in first_pos..=q {
            self.complement.remove(&x);
            if let Some(v) = self.p.get_mut(x - 1) {
                *v = 0;
            }
        }
        self.i = s1 - 1;
        Ok(())
    }
}

/// Expands every reduced repeat of `t` into the reduced alignment `e`,
/// scanning from right to left.
pub fn extend_alignment(e: &Alignment, t: &ReducedTrace) -> Result<Alignment, ExtendError> {
    let mut state = ExtensionState::new(e, t)?;
    while state.i > 0 {
        state.step()?;
    }
    Ok(Alignment::new(state.alignment))
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProperViolation {
    #[error("trace labels differ at trace position {0}")]
    TraceMismatch(usize),
    #[error("alignment spells {found} trace labels, trace has {expected}")]
    TraceLength { expected: usize, found: usize },
    #[error("synchronization {0} has arcs that do not fit its operation")]
    MalformedSynchronization(usize),
    #[error("synchronization {0} uses a graph arc labelled differently")]
    LabelMismatch(usize),
    #[error("model path does not start at the source")]
    WrongStart,
    #[error("model path is broken before synchronization {0}")]
    Disconnected(usize),
    #[error("model path does not end in a final node")]
    NotFinal,
}

/// Checks that the trace labels of `e` spell `t` and that its graph arcs
/// form a path from the source of `rg` to a final node.
pub fn verify_proper(e: &Alignment, t: &[Label], rg: &ReachabilityGraph) -> Result<(), ProperViolation> {
    let fsm = rg.fsm();
    let mut consumed = 0;
    let mut node = fsm.source();
    let mut first_arc = true;
    for (idx, s) in e.syncs().iter().enumerate() {
        let well_formed = match s.op {
            Op::MT => s.rg_arc.is_some(),
            Op::LH => s.rg_arc.is_none(),
            Op::RH => s.dafsa_arc.is_none() && s.rg_arc.is_some(),
        };
        if !well_formed {
            return Err(ProperViolation::MalformedSynchronization(idx + 1));
        }
        if s.on_trace() {
            consumed += 1;
            match t.get(consumed - 1) {
                Some(l) if *l == s.label => {}
                Some(_) => return Err(ProperViolation::TraceMismatch(consumed)),
                None => return Err(ProperViolation::TraceLength { expected: t.len(), found: consumed }),
            }
        }
        if let Some(a) = s.rg_arc {
            let arc = fsm.arcs().get(a).ok_or(ProperViolation::Disconnected(idx + 1))?;
            if arc.label != s.label {
                return Err(ProperViolation::LabelMismatch(idx + 1));
            }
            if arc.source != node {
                return Err(if first_arc {
                    ProperViolation::WrongStart
                } else {
                    ProperViolation::Disconnected(idx + 1)
                });
            }
            first_arc = false;
            node = arc.target;
        }
    }
    if consumed != t.len() {
        return Err(ProperViolation::TraceLength { expected: t.len(), found: consumed });
    }
    if !fsm.is_final(node) {
        return Err(ProperViolation::NotFinal);
    }
    Ok(())
}

/// Graph arcs of `e` in order, for diagnostics.
pub fn model_path(e: &Alignment) -> Vec<ArcId> {
    e.rg_arcs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::testing::parse_alignment;
    use crate::align::{align_dijkstra, standard_cost};
    use crate::log::{build_dafsa, examples::running_log, Dafsa, Trace};
    use crate::model::examples::{reversed_loops, running_example};
    use crate::model::{build_reachability_graph, DEFAULT_STATE_CAP};
    use crate::tandem::{reduce_log, reduce_trace};

    const REDUCED_THREE: &str = "MT(A),MT(B),MT(D),RH(E),MT(F),MT(B),MT(D),RH(E),MT(F),MT(B),MT(D)";
    const EXTENDED_THREE: &str =
        "MT(A),MT(B),MT(D),RH(E),MT(F),MT(B),MT(D),RH(E),MT(F),MT(B),MT(D),RH(E),MT(F),MT(B),MT(D)";

    struct Fixture {
        dafsa: Dafsa,
        rg: ReachabilityGraph,
        reductions: Vec<ReducedTrace>,
        originals: Vec<Trace>,
    }

    fn fixture() -> Fixture {
        let log = running_log();
        let (set, reductions) = reduce_log(&log);
        Fixture {
            dafsa: build_dafsa(&set),
            rg: build_reachability_graph(&running_example(), DEFAULT_STATE_CAP).unwrap(),
            reductions,
            originals: log.traces().to_vec(),
        }
    }

    #[test]
    fn trace_three_extension() {
        let f = fixture();
        let e = parse_alignment(REDUCED_THREE, f.dafsa.fsm(), f.rg.fsm());
        let t = &f.reductions[2];
        let state = ExtensionState::new(&e, t).unwrap();
        let bounds = state.copy_bounds(9).unwrap().unwrap();
        assert_eq!(bounds, CopyBounds { first: 2..=5, second: 6..=9 });
        assert_eq!(state.copy_bounds(11).unwrap(), None);
        let j = state.find_repeatable(&bounds);
        assert_eq!(j, Some(2));
        let mid = Alignment::new(state.build_middle_copy(&bounds, j));
        assert_eq!(mid.render(), "MT(B),MT(D),RH(E),MT(F)");

        let ext = extend_alignment(&e, t).unwrap();
        assert_eq!(ext.len(), 15);
        assert_eq!(ext.render(), EXTENDED_THREE);
        assert_eq!(standard_cost(&ext), 3);
        assert_eq!(verify_proper(&ext, &f.originals[2], &f.rg), Ok(()));
    }

    #[test]
    fn every_running_trace_extends_properly() {
        let f = fixture();
        let costs: Vec<usize> = f
            .reductions
            .iter()
            .zip(&f.originals)
            .map(|(r, t)| {
                let e = align_dijkstra(r, &f.dafsa, &f.rg).unwrap();
                let ext = extend_alignment(&e, r).unwrap();
                assert_eq!(verify_proper(&ext, t, &f.rg), Ok(()), "{t}");
                standard_cost(&ext)
            })
            .collect();
        assert_eq!(costs, vec![3, 3, 3, 4, 5]);
    }

    #[test]
    fn single_label_repeat_without_repeatable_match() {
        let f = fixture();
        let e = parse_alignment("MT(A),MT(B),LH(C),MT(C)", f.dafsa.fsm(), f.rg.fsm());
        let t = &f.reductions[0];
        let state = ExtensionState::new(&e, t).unwrap();
        let bounds = state.copy_bounds(4).unwrap().unwrap();
        assert_eq!(bounds, CopyBounds { first: 3..=3, second: 4..=4 });
        assert_eq!(state.find_repeatable(&bounds), None);
        assert_eq!(Alignment::new(state.build_middle_copy(&bounds, None)).render(), "LH(C)");
        let ext = extend_alignment(&e, t).unwrap();
        assert_eq!(ext.render(), "MT(A),MT(B),LH(C),LH(C),LH(C),MT(C)");
        assert_eq!(verify_proper(&ext, &f.originals[0], &f.rg), Ok(()));
    }

    #[test]
    fn right_hide_inside_the_first_copy() {
        let f = fixture();
        let e = parse_alignment(REDUCED_THREE, f.dafsa.fsm(), f.rg.fsm());
        let state = ExtensionState::new(&e, &f.reductions[4]).unwrap();
        assert_eq!(state.copy_bounds(9).unwrap().unwrap().first, 2..=5);
        let ext = extend_alignment(&e, &f.reductions[4]).unwrap();
        assert_eq!(ext.len(), 11 + 3 * 4);
        assert_eq!(standard_cost(&ext), 5);
        assert_eq!(Trace::new(ext.trace_labels()), f.originals[4]);
        assert_eq!(verify_proper(&ext, &f.originals[4], &f.rg), Ok(()));
    }

    #[test]
    fn crosswise_copies_fall_back_to_log_hides() {
        let rg = build_reachability_graph(&reversed_loops(), DEFAULT_STATE_CAP).unwrap();
        let original = Trace::from_chars("SCRCRCRT");
        let r = reduce_trace(&original);
        assert_eq!(r.labels(), &Trace::from_chars("SCRCRT"));
        let dafsa = build_dafsa([r.labels()]);
        let e = align_dijkstra(&r, &dafsa, &rg).unwrap();
        assert_eq!(e.render(), "MT(S),LH(C),MT(R),MT(C),LH(R),MT(T)");
        let state = ExtensionState::new(&e, &r).unwrap();
        let bounds = state.copy_bounds(5).unwrap().unwrap();
        assert_eq!(state.find_repeatable(&bounds), None);
        let ext = extend_alignment(&e, &r).unwrap();
        assert_eq!(ext.render(), "MT(S),LH(C),MT(R),LH(C),LH(R),MT(C),LH(R),MT(T)");
        assert_eq!(standard_cost(&ext), 4);
        assert_eq!(verify_proper(&ext, &original, &rg), Ok(()));
    }

    #[test]
    fn all_match_copies_repeat_a_full_copy() {
        let f = fixture();
        // Reduced ⟨A,B,D,E,F,B,D,E,F,B,C⟩ with one extra BDEF copy fits the model.
        let original = Trace::from_chars("ABDEFBDEFBDEFBC");
        let r = reduce_trace(&original);
        let dafsa = build_dafsa([r.labels()]);
        let e = align_dijkstra(&r, &dafsa, &f.rg).unwrap();
        assert_eq!(standard_cost(&e), 0);
        let state = ExtensionState::new(&e, &r).unwrap();
        let bounds = state.copy_bounds(9).unwrap().unwrap();
        assert_eq!(state.find_repeatable(&bounds), Some(2));
        assert_eq!(Alignment::new(state.build_middle_copy(&bounds, Some(2))).render(), "MT(B),MT(D),MT(E),MT(F)");
        let ext = extend_alignment(&e, &r).unwrap();
        assert_eq!(standard_cost(&ext), 0);
        assert_eq!(verify_proper(&ext, &original, &f.rg), Ok(()));
    }

    #[test]
    fn repeat_free_alignment_is_unchanged() {
        let f = fixture();
        let t = Trace::from_chars("ABC");
        let r = reduce_trace(&t);
        let e = parse_alignment("MT(A),MT(B),MT(C)", build_dafsa([&t]).fsm(), f.rg.fsm());
        assert_eq!(extend_alignment(&e, &r).unwrap(), e);
    }

    #[test]
    fn broken_alignments_fail_verification() {
        let f = fixture();
        let t = &f.originals[2];
        let ext = parse_alignment(EXTENDED_THREE, build_dafsa([t]).fsm(), f.rg.fsm());
        assert_eq!(verify_proper(&ext, t, &f.rg), Ok(()));

        let mut missing = ext.syncs().to_vec();
        missing.remove(1);
        let missing = Alignment::new(missing);
        assert!(matches!(
            verify_proper(&missing, t, &f.rg),
            Err(ProperViolation::TraceMismatch(_) | ProperViolation::TraceLength { .. })
        ));

        let mut swapped = ext.syncs().to_vec();
        let (a, b) = (swapped[1].rg_arc, swapped[2].rg_arc);
        swapped[1].rg_arc = b;
        swapped[2].rg_arc = a;
        assert!(matches!(
            verify_proper(&Alignment::new(swapped), t, &f.rg),
            Err(ProperViolation::WrongStart | ProperViolation::Disconnected(_) | ProperViolation::LabelMismatch(_))
        ));

        let prefix = Alignment::new(ext.syncs()[..14].to_vec());
        assert_eq!(verify_proper(&prefix, &t[..11], &f.rg), Err(ProperViolation::NotFinal));
    }

    #[test]
    fn inconsistent_complement_is_reported() {
        let f = fixture();
        let e = parse_alignment(REDUCED_THREE, f.dafsa.fsm(), f.rg.fsm());
        let t = &f.reductions[2];
        let mut complement = t.complement_map().clone();
        complement.insert(5, 3);
        let bad = ReducedTrace::from_parts(t.labels().clone(), t.p_values().to_vec(), t.k_red(), complement);
        assert!(matches!(extend_alignment(&e, &bad), Err(ExtendError::InconsistentComplement(_))));
    }
}
