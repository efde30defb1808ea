//! Second phase: every vertex not yet dominated picks a dominator in its
//! closed neighborhood.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, VertexId};
use crate::runtime::{LocalView, NodeProgram, RuntimeError, Value};

pub const FIELD_DOM: &str = "dom";

/// How a vertex chooses its dominator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum Phase2Rule {
    /// Smallest ID among the neighbors of maximum residual degree.
    #[default]
    MaxResidual,
    /// Smallest ID whose residual degree exceeds `4c + 2c(t-1)`; if none
    /// does, the smallest ID in the closed neighborhood.
    FirstOrderThreshold,
}

pub fn fo_threshold(c: u64, t: u64) -> u64 {
    4 * c + 2 * c * (t - 1)
}

/// Dominator choice of `v` from a graph that contains `N³[v]`, given the
/// membership test for the set `D`. `None` means `v` is already dominated.
pub fn choose_dominator(
    g: &Graph,
    v: VertexId,
    in_d: impl Fn(VertexId) -> bool,
    rule: Phase2Rule,
    threshold: u64,
) -> Option<VertexId> {
    let closed = |i: usize| std::iter::once(i).chain(g.neighbor_indices(i).iter().copied());
    let dominated = |i: usize| closed(i).any(|j| in_d(g.id_at(j)));
    let vi = g.index_of(v)?;
    if dominated(vi) {
        return None;
    }
    let residual = |w: usize| closed(w).filter(|&x| !dominated(x)).count() as u64;
    // Closed neighborhood in ascending ID order.
    let mut nv: Vec<usize> = closed(vi).collect();
    nv.sort_unstable();
    let pick = match rule {
        Phase2Rule::MaxResidual => {
            let mut best = (0, nv[0]);
            for &w in &nv {
                let r = residual(w);
                if r > best.0 {
                    best = (r, w);
                }
            }
            best.1
        }
        Phase2Rule::FirstOrderThreshold => nv
            .iter()
            .copied()
            .find(|&w| residual(w) > threshold)
            .unwrap_or(nv[0]),
    };
    Some(g.id_at(pick))
}

pub struct Phase2Program {
    pub rule: Phase2Rule,
    pub threshold: u64,
    /// Annotation holding membership in `D`.
    pub d_field: String,
}

impl NodeProgram for Phase2Program {
    fn name(&self) -> String {
        "phase2".into()
    }

    fn radius(&self) -> usize {
        3
    }

    fn consumes(&self) -> Vec<String> {
        vec![self.d_field.clone()]
    }

    fn produces(&self) -> String {
        FIELD_DOM.into()
    }

    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError> {
        let g = view.graph();
        let mut flags = BTreeMap::new();
        for &u in g.vertices() {
            flags.insert(u, view.flag(u, &self.d_field)?);
        }
        Ok(Value::Vertex(choose_dominator(
            g,
            view.center(),
            |u| flags[&u],
            self.rule,
            self.threshold,
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_all(g: &Graph, d: &[u64], rule: Phase2Rule) -> BTreeMap<u64, u64> {
        g.vertices()
            .iter()
            .filter_map(|&v| {
                choose_dominator(g, v, |u| d.contains(&u.0), rule, fo_threshold(3, 3))
                    .map(|w| (v.0, w.0))
            })
            .collect()
    }

    #[test]
    fn star_everyone_picks_center() {
        let g = Graph::from_edges(6, &[(1, 2), (1, 3), (1, 4), (1, 5), (1, 6)]).unwrap();
        let dom = run_all(&g, &[], Phase2Rule::MaxResidual);
        assert!(dom.values().all(|&w| w == 1));
        assert_eq!(dom.len(), 6);
    }

    #[test]
    fn path_tie_breaks_by_smallest_id() {
        let g = Graph::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let dom = run_all(&g, &[], Phase2Rule::MaxResidual);
        let expect: BTreeMap<u64, u64> = [(1, 2), (2, 2), (3, 2), (4, 3), (5, 4)].into();
        assert_eq!(dom, expect);
    }

    #[test]
    fn fully_dominated_graph_needs_nothing() {
        let g = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(run_all(&g, &[1, 2, 3], Phase2Rule::MaxResidual).is_empty());
        assert!(run_all(&g, &[2], Phase2Rule::FirstOrderThreshold).is_empty());
    }

    #[test]
    fn threshold_rule_falls_back_to_smallest_id() {
        let g = Graph::from_edges(5, &[(1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let dom = run_all(&g, &[], Phase2Rule::FirstOrderThreshold);
        let expect: BTreeMap<u64, u64> = [(1, 1), (2, 1), (3, 2), (4, 3), (5, 4)].into();
        assert_eq!(dom, expect);
        // with threshold 2 the first neighbor of residual degree 3 wins
        let v = choose_dominator(&g, VertexId(3), |_| false, Phase2Rule::FirstOrderThreshold, 2);
        assert_eq!(v, Some(VertexId(2)));
        assert_eq!(fo_threshold(3, 3), 24);
    }

    #[test]
    fn isolated_vertices_dominate_themselves() {
        let g = Graph::from_edges(3, &[]).unwrap();
        let dom = run_all(&g, &[], Phase2Rule::MaxResidual);
        assert_eq!(dom, [(1, 1), (2, 2), (3, 3)].into());
    }
}
