//! Tandem-repeat detection and lossless trace reduction.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use thiserror::Error;

use crate::log::{EventLog, Trace};
use crate::Label;

/// `(s, α, k)`: `α` occurs `k` times back to back from 1-based position `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TandemRepeat {
    pub start: usize,
    pub repeat_type: Vec<Label>,
    pub k: usize,
}

impl TandemRepeat {
    pub fn period(&self) -> usize {
        self.repeat_type.len()
    }

    /// Number of labels covered, `|α|·k`.
    pub fn span(&self) -> usize {
        self.period() * self.k
    }
}

impl fmt::Display for TandemRepeat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let alpha: Vec<&str> = self.repeat_type.iter().map(|l| l.as_ref()).collect();
        write!(f, "({},{},{})", self.start, alpha.join(""), self.k)
    }
}

fn is_primitive(alpha: &[Label]) -> bool {
    let p = alpha.len();
    (1..p).filter(|d| p.is_multiple_of(*d)).all(|d| (d..p).any(|j| alpha[j] != alpha[j - d]))
}

/// Maximal primitive tandem repeats of `t`, leftmost first.
///
/// For every period, each maximal run `t[j] = t[j+|α|]` yields candidate
/// repeats at each rotation of its primitive repeat type. Candidates are
/// then reported by a left-to-right scan: all candidates starting at the
/// current position are reported (shortest period first) and the scan
/// resumes after the longest reported repeat type, so rotations and repeats
/// nested in an already reported copy are omitted.
pub fn find_tandem_repeats(t: &[Label]) -> Vec<TandemRepeat> {
    let n = t.len();
    // candidates[s] holds (period, k) pairs for 0-based start s.
    let mut candidates: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for p in 1..=n / 2 {
        let mut j = 0;
        while j + p < n {
            if t[j] != t[j + p] {
                j += 1;
                continue;
            }
            let a = j;
            while j + p < n && t[j] == t[j + p] {
                j += 1;
            }
            // Matching run [a, j): the periodic region is [a, j + p).
            let end = j + p;
            if j - a >= p && is_primitive(&t[a..a + p]) {
                for (s, at) in candidates.iter_mut().enumerate().skip(a).take(p) {
                    let k = (end - s) / p;
                    if k >= 2 {
                        at.push((p, k));
                    }
                }
            }
        }
    }
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let here = &mut candidates[i];
        if here.is_empty() {
            i += 1;
            continue;
        }
        here.sort_unstable();
        let mut longest = 0;
        for &(p, k) in here.iter() {
            out.push(TandemRepeat { start: i + 1, repeat_type: t[i..i + p].to_vec(), k });
            longest = longest.max(p);
        }
        i += longest;
    }
    out
}

/// The repeats reported by [`find_tandem_repeats`] that start at `i`.
pub fn repeats_starting_at(t: &[Label], i: usize) -> Vec<TandemRepeat> {
    find_tandem_repeats(t).into_iter().filter(|r| r.start == i).collect()
}

/// A trace with its reduction bookkeeping. Positions are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducedTrace {
    rt: Trace,
    p: Vec<usize>,
    k_red: usize,
    complement: BTreeMap<usize, usize>,
    pos: usize,
    // Repeats of the current `rt`, recomputed after each reduction.
    repeats: Vec<TandemRepeat>,
}

impl ReducedTrace {
    /// The unreduced starting point for `t`.
    pub fn new(t: Trace) -> Self {
        let repeats = find_tandem_repeats(&t);
        ReducedTrace { p: vec![0; t.len()], rt: t, k_red: 0, complement: BTreeMap::new(), pos: 1, repeats }
    }

    /// Builds a reduced trace from explicit bookkeeping, e.g. for tests.
    pub fn from_parts(rt: Trace, p: Vec<usize>, k_red: usize, complement: BTreeMap<usize, usize>) -> Self {
        assert_eq!(rt.len(), p.len());
        let pos = rt.len() + 1;
        ReducedTrace { rt, p, k_red, complement, pos, repeats: Vec::new() }
    }

    pub fn labels(&self) -> &Trace {
        &self.rt
    }

    pub fn len(&self) -> usize {
        self.rt.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rt.is_empty()
    }

    /// `p(i)`, zero outside `1..=|rt|`.
    pub fn p(&self, i: usize) -> usize {
        if i == 0 {
            0
        } else {
            self.p.get(i - 1).copied().unwrap_or(0)
        }
    }

    pub fn p_values(&self) -> &[usize] {
        &self.p
    }

    pub fn k_red(&self) -> usize {
        self.k_red
    }

    /// `TR_c(j)`.
    pub fn complement(&self, j: usize) -> Option<usize> {
        self.complement.get(&j).copied()
    }

    pub fn complement_map(&self) -> &BTreeMap<usize, usize> {
        &self.complement
    }

    /// The scan position.
    pub fn pos(&self) -> usize {
        self.pos
    }

    pub fn original_len(&self) -> usize {
        self.rt.len() + self.k_red
    }
}

fn pick(repeats: &[TandemRepeat], pos: usize) -> Option<&TandemRepeat> {
    let mut best: Option<&TandemRepeat> = None;
    for r in repeats.iter().filter(|r| r.start == pos && r.k >= 3) {
        let better = match best {
            None => true,
            Some(b) => (r.span(), r.period()) > (b.span(), b.period()),
        };
        if better {
            best = Some(r);
        }
    }
    best
}

/// One reduction at the scan position. Returns `false`, leaving `t`
/// untouched, when no repeat with at least three copies starts there.
pub fn reduce_step(t: &mut ReducedTrace) -> bool {
    let Some(r) = pick(&t.repeats, t.pos).cloned() else {
        return false;
    };
    let i = t.pos;
    let m = r.period();
    let removed = (r.k - 2) * m;
    let labels = t.rt.labels();
    let mut rt: Vec<Label> = Vec::with_capacity(labels.len() - removed);
    rt.extend_from_slice(&labels[..i - 1 + 2 * m]);
    rt.extend_from_slice(&labels[i - 1 + r.span()..]);
    t.p.drain(i - 1 + 2 * m..i - 1 + r.span());
    for x in &mut t.p[i - 1..i - 1 + 2 * m] {
        *x = r.k - 2;
    }
    for j in i..i + m {
        t.complement.insert(j, j + m);
        t.complement.insert(j + m, j);
    }
    t.k_red += removed;
    t.pos += 2 * m;
    t.rt = Trace::new(rt);
    t.repeats = find_tandem_repeats(&t.rt);
    true
}

/// Applies [`reduce_step`] from position 1 to the end, advancing by one
/// position whenever nothing is reduced.
pub fn reduce_trace(t: &Trace) -> ReducedTrace {
    let mut r = ReducedTrace::new(t.clone());
    while r.pos <= r.rt.len() {
        if !reduce_step(&mut r) {
            r.pos += 1;
        }
    }
    r
}

/// Reduces every trace of `log`. Returns the distinct reduced label
/// sequences (first-occurrence order) and one reduction per trace id.
pub fn reduce_log(log: &EventLog) -> (Vec<Trace>, Vec<ReducedTrace>) {
    let distinct: Vec<ReducedTrace> = log.distinct().par_iter().map(|d| reduce_trace(&d.trace)).collect();
    let mut per_trace: Vec<Option<ReducedTrace>> = vec![None; log.len()];
    for (d, r) in log.distinct().iter().zip(&distinct) {
        for &id in &d.ids {
            per_trace[id] = Some(r.clone());
        }
    }
    let mut set: Vec<Trace> = Vec::new();
    for r in &distinct {
        if !set.contains(r.labels()) {
            set.push(r.labels().clone());
        }
    }
    (set, per_trace.into_iter().map(|r| r.expect("every trace is in the index")).collect())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("inconsistent reduction bookkeeping at position {0}")]
pub struct InconsistentReduction(pub usize);

/// Re-inserts every reduced repeat, recovering the original trace.
pub fn expand_trace(t: &ReducedTrace) -> Result<Trace, InconsistentReduction> {
    let labels = t.rt.labels();
    let n = labels.len();
    let mut out = Vec::with_capacity(t.original_len());
    let mut j = 1;
    while j <= n {
        match t.complement(j) {
            Some(c) if c > j => {
                let m = c - j;
                let q = t.p(j);
                if j + 2 * m - 1 > n || q == 0 {
                    return Err(InconsistentReduction(j));
                }
                for x in 0..m {
                    let (a, b) = (j + x, j + m + x);
                    if t.complement(a) != Some(b)
                        || t.complement(b) != Some(a)
                        || labels[a - 1] != labels[b - 1]
                        || t.p(a) != q
                        || t.p(b) != q
                    {
                        return Err(InconsistentReduction(a));
                    }
                }
                let alpha = &labels[j - 1..j - 1 + m];
                for _ in 0..q + 2 {
                    out.extend_from_slice(alpha);
                }
                j += 2 * m;
            }
            Some(_) => return Err(InconsistentReduction(j)),
            None if t.p(j) != 0 => return Err(InconsistentReduction(j)),
            None => {
                out.push(labels[j - 1].clone());
                j += 1;
            }
        }
    }
    Ok(Trace::new(out))
}
