//! First phase: vertices whose open neighborhood cannot be dominated by a
//! few other vertices.

use crate::bitset::BitSet;
use crate::graph::{Graph, GraphError, VertexId};
use crate::runtime::{LocalView, NodeProgram, RuntimeError, Value};

pub const FIELD_IN_D: &str = "in_d";

/// Looks for `A` with `|A| <= k`, `v ∉ A` and `N(v) ⊆ N[A]`.
///
/// Only vertices of `N²[v] ∖ {v}` can dominate a neighbor of `v`, so the
/// search is confined to them. Branching is on the neighbor with the fewest
/// possible dominators.
pub fn coverage_witness(g: &Graph, v: VertexId, k: usize) -> Result<Option<Vec<VertexId>>, GraphError> {
    let vi = g.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
    let targets: &[usize] = g.neighbor_indices(vi);
    if targets.len() <= k {
        return Ok(Some(targets.iter().map(|&i| g.id_at(i)).collect()));
    }
    let pos = |i: usize| targets.binary_search(&i).ok();
    // Candidate dominators with the targets each of them covers.
    let mut cand: Vec<usize> = targets
        .iter()
        .flat_map(|&w| std::iter::once(w).chain(g.neighbor_indices(w).iter().copied()))
        .filter(|&a| a != vi)
        .collect();
    cand.sort_unstable();
    cand.dedup();
    let covers: Vec<BitSet> = cand
        .iter()
        .map(|&a| {
            let mut s = BitSet::new(targets.len());
            for x in std::iter::once(a).chain(g.neighbor_indices(a).iter().copied()) {
                if let Some(p) = pos(x) {
                    s.insert(p);
                }
            }
            s
        })
        .collect();
    // options[p]: candidates covering target p, largest coverage first
    let mut options: Vec<Vec<usize>> = vec![Vec::new(); targets.len()];
    for (ci, s) in covers.iter().enumerate() {
        for p in s.iter() {
            options[p].push(ci);
        }
    }
    for opts in &mut options {
        opts.sort_by_key(|&ci| std::cmp::Reverse(covers[ci].count()));
    }
    let max_cover = covers.iter().map(BitSet::count).max().unwrap_or(0);
    let mut chosen = Vec::with_capacity(k);
    let uncovered = BitSet::full(targets.len());
    let found = branch(&covers, &options, max_cover, k, &uncovered, &mut chosen);
    Ok(found.then(|| {
        let mut a: Vec<VertexId> = chosen.iter().map(|&ci| g.id_at(cand[ci])).collect();
        a.sort_unstable();
        a
    }))
}

fn branch(
    covers: &[BitSet],
    options: &[Vec<usize>],
    max_cover: usize,
    k: usize,
    uncovered: &BitSet,
    chosen: &mut Vec<usize>,
) -> bool {
    let left = uncovered.count();
    if left == 0 {
        return true;
    }
    let room = k - chosen.len();
    if room == 0 || left > room * max_cover {
        return false;
    }
    let p = uncovered
        .iter()
        .min_by_key(|&p| options[p].len())
        .expect("nonempty");
    for &ci in &options[p] {
        chosen.push(ci);
        let mut rest = uncovered.clone();
        rest.difference_with(&covers[ci]);
        if branch(covers, options, max_cover, k, &rest, chosen) {
            return true;
        }
        chosen.pop();
    }
    false
}

/// `v ∈ D` iff no set of at most `k` other vertices dominates `N(v)`.
pub fn in_phase1_set(g: &Graph, v: VertexId, k: usize) -> Result<bool, GraphError> {
    Ok(coverage_witness(g, v, k)?.is_none())
}

/// Runs the membership test at every vertex over its 2-ball.
pub struct Phase1Program {
    pub k: usize,
}

impl NodeProgram for Phase1Program {
    fn name(&self) -> String {
        "phase1".into()
    }

    fn radius(&self) -> usize {
        2
    }

    fn consumes(&self) -> Vec<String> {
        Vec::new()
    }

    fn produces(&self) -> String {
        FIELD_IN_D.into()
    }

    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError> {
        Ok(Value::Flag(in_phase1_set(view.graph(), view.center(), self.k)?))
    }
}
