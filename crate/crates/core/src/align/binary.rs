use std::collections::VecDeque;

use rayon::prelude::*;

use super::{AlignError, Aligner, Alignment};
use crate::log::ReducedGroup;
use crate::tandem::ReducedTrace;

/// Reduced alignments indexed by original trace id.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct AlignmentTable {
    entries: Vec<Option<Alignment>>,
}

impl AlignmentTable {
    pub fn get(&self, id: usize) -> Option<&Alignment> {
        self.entries.get(id).and_then(Option::as_ref)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }
}

/// Distinct reductions of a group, ascending by `k_red` (ties by first id),
/// each with the trace ids that share it.
pub fn group_members<'r>(group: &ReducedGroup, reductions: &'r [ReducedTrace]) -> Vec<(&'r ReducedTrace, Vec<usize>)> {
    let mut members: Vec<(&ReducedTrace, Vec<usize>)> = Vec::new();
    for &id in &group.ids {
        let r = &reductions[id];
        match members.iter_mut().find(|(m, _)| *m == r) {
            Some((_, ids)) => ids.push(id),
            None => members.push((r, vec![id])),
        }
    }
    members.sort_by_key(|(r, ids)| (r.k_red(), ids[0]));
    members
}

fn search_group(members: &[(&ReducedTrace, Vec<usize>)], aligner: &Aligner<'_>) -> Result<Vec<Alignment>, AlignError> {
    let n = members.len();
    let mut table: Vec<Option<Alignment>> = vec![None; n];
    let mut pairs = VecDeque::from([(0, n - 1)]);
    while let Some((lo, up)) = pairs.pop_front() {
        for b in [lo, up] {
            if table[b].is_none() {
                table[b] = Some(aligner.align_reduced(members[b].0)?);
            }
        }
        let (a_lo, a_up) = (table[lo].as_ref().unwrap(), table[up].as_ref().unwrap());
        if a_lo.same_synchronizations(a_up) {
            let shared = a_lo.clone();
            for slot in table.iter_mut().take(up).skip(lo + 1) {
                *slot = Some(shared.clone());
            }
        } else if up > lo + 1 {
            pairs.push_back((lo, (lo + up) / 2));
            pairs.push_back(((lo + up).div_ceil(2), up));
        }
    }
    Ok(table.into_iter().map(|a| a.expect("every member aligned")).collect())
}

/// Aligns every group, aligning interval borders of `k_red`-sorted members
/// and sharing the alignment across an interval whose borders agree.
pub fn binary_search_align(
    groups: &[ReducedGroup],
    reductions: &[ReducedTrace],
    aligner: &Aligner<'_>,
) -> Result<AlignmentTable, AlignError> {
    let per_group: Vec<Vec<(Vec<usize>, Alignment)>> = groups
        .par_iter()
        .map(|g| {
            let members = group_members(g, reductions);
            let aligned = search_group(&members, aligner)?;
            Ok(members.into_iter().map(|(_, ids)| ids).zip(aligned).collect())
        })
        .collect::<Result<_, AlignError>>()?;
    let mut entries = vec![None; reductions.len()];
    for (ids, alignment) in per_group.into_iter().flatten() {
        for id in ids {
            entries[id] = Some(alignment.clone());
        }
    }
    Ok(AlignmentTable { entries })
}
