//! Local dominating set approximation.
//!
//! The algorithm runs as a pipeline of node programs:
//!
//! 1. `phase1` (radius 2): `v` joins `D` when no `2c` vertices other than
//!    `v` dominate `N(v)`.
//! 2. Preprocessing (only when the genus bound `g` is positive): disjoint
//!    canonical `K_{3,3}` witnesses are moved into `D`.
//! 3. `phase2` (radius 3): every vertex outside `N[D]` picks a dominator,
//!    and the chosen dominators form `D'`.
//!
//! The parameter `t` only enters through the threshold of
//! [`Phase2Rule::FirstOrderThreshold`].

pub mod k33;
pub mod phase1;
pub mod phase2;
pub mod preprocess;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, VertexId};
use crate::runtime::{self, Annotations, NodeProgram, Pipeline, RoundTrace, RuntimeError, Value};

pub use k33::{find_canonical_k33, CanonicalK33};
pub use phase1::{coverage_witness, Phase1Program};
pub use phase2::{fo_threshold, Phase2Program, Phase2Rule};
pub use preprocess::KvRefresh;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MdsError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Runtime(#[from] RuntimeError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Config {
    /// Integer upper bound on the edge density of the graph and its minors.
    pub c: u64,
    /// Genus bound; also the number of preprocessing iterations.
    pub g: u64,
    /// `K_{t,3}` exclusion parameter.
    pub t: u64,
    pub phase2_rule: Phase2Rule,
    #[serde(default)]
    pub kv_refresh: KvRefresh,
}

impl Config {
    /// Defaults for graphs of genus at most `g`: `c = 3` for planar inputs,
    /// `3 + 6g` otherwise, and `t = 4g + 3`.
    pub fn for_genus(g: u64) -> Self {
        Config {
            c: default_c(g),
            g,
            t: crate::minor::genus::excluded_t(g),
            phase2_rule: Phase2Rule::MaxResidual,
            kv_refresh: KvRefresh::Once,
        }
    }

    pub fn planar() -> Self {
        Config::for_genus(0)
    }

    pub fn with_rule(mut self, rule: Phase2Rule) -> Self {
        self.phase2_rule = rule;
        self
    }

    pub fn validate(&self) -> Result<(), MdsError> {
        if self.c < 1 {
            return Err(MdsError::Config("c must be at least 1".into()));
        }
        if self.t < 3 {
            return Err(MdsError::Config("t must be at least 3".into()));
        }
        Ok(())
    }

    /// Coverage size limit of the first phase.
    pub fn phase1_k(&self) -> usize {
        (2 * self.c) as usize
    }

    pub fn threshold(&self) -> u64 {
        fo_threshold(self.c, self.t)
    }

    /// Rounds the full pipeline reports for this configuration.
    pub fn expected_rounds(&self) -> usize {
        let g = self.g as usize;
        match (g, self.kv_refresh) {
            (0, _) => 5,
            (_, KvRefresh::Once) => 12 * g + 17,
            (_, KvRefresh::EveryIteration) => 24 * g + 5,
        }
    }
}

pub fn default_c(g: u64) -> u64 {
    if g == 0 {
        3
    } else {
        3 + 6 * g
    }
}

/// A dominating set together with where each vertex came from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DsResult {
    pub config: Config,
    pub d_phase1: Vec<VertexId>,
    pub d_preprocess: Vec<VertexId>,
    pub d_phase2: Vec<VertexId>,
    /// Dominator of every vertex not dominated after preprocessing.
    pub dom_map: BTreeMap<VertexId, VertexId>,
    pub trace: Vec<RoundTrace>,
}

impl DsResult {
    /// The union of all three parts, sorted.
    pub fn dominating_set(&self) -> Vec<VertexId> {
        let all: BTreeSet<VertexId> = self
            .d_phase1
            .iter()
            .chain(&self.d_preprocess)
            .chain(&self.d_phase2)
            .copied()
            .collect();
        all.into_iter().collect()
    }

    pub fn size(&self) -> usize {
        self.dominating_set().len()
    }

    pub fn rounds(&self) -> usize {
        runtime::total_rounds(&self.trace)
    }

    pub fn rounds_of(&self, phase_prefix: &str) -> usize {
        self.trace
            .iter()
            .filter(|t| t.phase_name.starts_with(phase_prefix))
            .map(|t| t.rounds_used)
            .sum()
    }
}

/// Builds the node programs for `cfg`: phase 1, preprocessing, phase 2.
pub fn pipeline(cfg: &Config) -> Result<Pipeline, MdsError> {
    cfg.validate()?;
    let mut phases: Vec<Box<dyn NodeProgram>> = vec![Box::new(Phase1Program { k: cfg.phase1_k() })];
    let (pre, d_field) = preprocess::programs(cfg.g, cfg.kv_refresh, phase1::FIELD_IN_D);
    phases.extend(pre);
    phases.push(Box::new(Phase2Program {
        rule: cfg.phase2_rule,
        threshold: cfg.threshold(),
        d_field,
    }));
    Ok(Pipeline::new(phases, &[])?)
}

fn flagged(ann: &Annotations, field: &str) -> Vec<VertexId> {
    ann.iter()
        .filter(|(_, r)| r.get(field).and_then(Value::as_flag) == Some(true))
        .map(|(v, _)| *v)
        .collect()
}

/// Phase 1 alone.
pub fn phase1(g: &Graph, cfg: &Config) -> Result<Vec<VertexId>, MdsError> {
    cfg.validate()?;
    let (out, _) = runtime::run_program(g, &Phase1Program { k: cfg.phase1_k() }, &Annotations::new())?;
    Ok(out
        .into_iter()
        .filter(|(_, v)| v.as_flag() == Some(true))
        .map(|(v, _)| v)
        .collect())
}

fn d_annotations(g: &Graph, d: &[VertexId], field: &str) -> Annotations {
    let d: BTreeSet<_> = d.iter().collect();
    g.vertices()
        .iter()
        .map(|v| (*v, [(field.to_string(), Value::Flag(d.contains(v)))].into()))
        .collect()
}

/// Preprocessing alone, starting from the set `d`. Returns the added
/// vertices and the traces of the preprocessing programs.
pub fn preprocess(g: &Graph, d: &[VertexId], cfg: &Config) -> Result<(Vec<VertexId>, Vec<RoundTrace>), MdsError> {
    cfg.validate()?;
    let (programs, field) = preprocess::programs(cfg.g, cfg.kv_refresh, phase1::FIELD_IN_D);
    let p = Pipeline::new(programs, &[phase1::FIELD_IN_D])?;
    let run = p.run(g, d_annotations(g, d, phase1::FIELD_IN_D))?;
    let before: BTreeSet<_> = d.iter().collect();
    let added = flagged(&run.annotations, &field)
        .into_iter()
        .filter(|v| !before.contains(v))
        .collect();
    Ok((added, run.traces))
}

/// Phase 2 alone, for a given set `d`. Returns the dominator map and `D'`.
pub fn phase2(
    g: &Graph,
    d: &[VertexId],
    cfg: &Config,
) -> Result<(BTreeMap<VertexId, VertexId>, Vec<VertexId>), MdsError> {
    cfg.validate()?;
    let prog = Phase2Program {
        rule: cfg.phase2_rule,
        threshold: cfg.threshold(),
        d_field: phase1::FIELD_IN_D.into(),
    };
    let (out, _) = runtime::run_program(g, &prog, &d_annotations(g, d, phase1::FIELD_IN_D))?;
    let dom: BTreeMap<VertexId, VertexId> = out
        .into_iter()
        .filter_map(|(v, val)| val.as_vertex().flatten().map(|w| (v, w)))
        .collect();
    let image: BTreeSet<VertexId> = dom.values().copied().collect();
    Ok((dom, image.into_iter().collect()))
}

/// Runs the whole pipeline.
pub fn solve(g: &Graph, cfg: &Config) -> Result<DsResult, MdsError> {
    let run = pipeline(cfg)?.run(g, Annotations::new())?;
    let ann = &run.annotations;
    let d_phase1 = flagged(ann, phase1::FIELD_IN_D);
    let (_, final_field) = preprocess::programs(cfg.g, cfg.kv_refresh, phase1::FIELD_IN_D);
    let in_phase1: BTreeSet<_> = d_phase1.iter().copied().collect();
    let d_preprocess = flagged(ann, &final_field)
        .into_iter()
        .filter(|v| !in_phase1.contains(v))
        .collect();
    let dom_map: BTreeMap<VertexId, VertexId> =
        runtime::collect_field(ann, phase2::FIELD_DOM, |v| v.as_vertex().flatten());
    let d_phase2: BTreeSet<VertexId> = dom_map.values().copied().collect();
    Ok(DsResult {
        config: *cfg,
        d_phase1,
        d_preprocess,
        d_phase2: d_phase2.into_iter().collect(),
        dom_map,
        trace: run.traces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ids;

    fn grid(r: u64, c: u64) -> Graph {
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                let v = i * c + j + 1;
                if j + 1 < c {
                    e.push((v, v + 1));
                }
                if i + 1 < r {
                    e.push((v, v + c));
                }
            }
        }
        Graph::from_edges(r * c, &e).unwrap()
    }

    fn complete(n: u64) -> Graph {
        let mut e = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                e.push((a, b));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    /// Disjoint K_{3,3} on 1..=6 and a 4x4 grid on 7..=22.
    fn k33_plus_grid() -> Graph {
        let mut e: Vec<(u64, u64)> = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                e.push((a, b));
            }
        }
        for (u, v) in grid(4, 4).edges() {
            e.push((u.0 + 6, v.0 + 6));
        }
        Graph::from_edges(22, &e).unwrap()
    }

    #[test]
    fn defaults() {
        let c = Config::for_genus(0);
        assert_eq!((c.c, c.t), (3, 3));
        let c = Config::for_genus(2);
        assert_eq!((c.c, c.t), (15, 11));
        assert!(Config { t: 2, ..Config::planar() }.validate().is_err());
        assert!(Config { c: 0, ..Config::planar() }.validate().is_err());
    }

    #[test]
    fn phase1_examples() {
        assert!(phase1(&grid(4, 4), &Config::planar()).unwrap().is_empty());
        let star: Vec<_> = (2..=21).map(|l| (1, l)).collect();
        let star = Graph::from_edges(21, &star).unwrap();
        assert_eq!(phase1(&star, &Config::planar()).unwrap(), ids(&[1]));
    }

    #[test]
    fn solve_k4() {
        let r = solve(&complete(4), &Config::planar()).unwrap();
        assert!(r.d_phase1.is_empty());
        assert_eq!(r.d_phase2, ids(&[1]));
        assert_eq!(r.size(), 1);
        assert_eq!(r.rounds(), 5);
    }

    #[test]
    fn solve_isolated_vertices() {
        let g = Graph::from_edges(5, &[]).unwrap();
        for cfg in [Config::planar(), Config::for_genus(1)] {
            let r = solve(&g, &cfg).unwrap();
            assert!(r.d_phase1.is_empty());
            assert_eq!(r.dominating_set(), ids(&[1, 2, 3, 4, 5]));
            assert!(r.dom_map.iter().all(|(v, w)| v == w));
        }
    }

    #[test]
    fn solve_grid_is_dominating() {
        let g = grid(4, 4);
        let r = solve(&g, &Config::planar()).unwrap();
        assert!(g.is_dominating_set(&r.dominating_set()).unwrap());
        assert!(r.size() <= 199 * 4);
    }

    #[test]
    fn empty_graph() {
        let r = solve(&Graph::default(), &Config::for_genus(1)).unwrap();
        assert_eq!(r.size(), 0);
    }

    #[test]
    fn phase2_everything_dominated() {
        let g = grid(3, 3);
        let (dom, dp) = phase2(&g, g.vertices(), &Config::planar()).unwrap();
        assert!(dom.is_empty() && dp.is_empty());
    }

    #[test]
    fn planar_preprocessing_is_a_no_op() {
        let g = grid(4, 4);
        let (added, traces) = preprocess(&g, &[], &Config::planar()).unwrap();
        assert!(added.is_empty());
        assert!(traces.is_empty());
    }

    #[test]
    fn preprocessing_takes_the_k33_once() {
        let g = k33_plus_grid();
        for refresh in [KvRefresh::Once, KvRefresh::EveryIteration] {
            let cfg = Config {
                kv_refresh: refresh,
                ..Config::for_genus(1)
            };
            let witnesses: Vec<_> = (1..=6)
                .map(|v| find_canonical_k33(&g, VertexId(v)).unwrap().unwrap().vertices)
                .collect();
            assert!(witnesses.iter().all(|w| *w == ids(&[1, 2, 3, 4, 5, 6])));
            let (added, traces) = preprocess(&g, &[], &cfg).unwrap();
            assert_eq!(added, ids(&[1, 2, 3, 4, 5, 6]));
            assert_eq!(runtime::total_rounds(&traces), cfg.expected_rounds() - 5);
            let d: Vec<_> = added.clone();
            assert!(preprocess::residual_witnesses(&g, &d).unwrap().is_empty());
        }
    }

    #[test]
    fn round_counts() {
        let g = k33_plus_grid();
        for genus in 0..=3 {
            for refresh in [KvRefresh::Once, KvRefresh::EveryIteration] {
                let cfg = Config {
                    kv_refresh: refresh,
                    ..Config::for_genus(genus)
                };
                let r = solve(&g, &cfg).unwrap();
                assert_eq!(r.rounds(), cfg.expected_rounds());
            }
        }
        assert_eq!(Config::for_genus(3).expected_rounds(), 12 * 3 + 17);
    }

    #[test]
    fn dom_map_invariants() {
        let g = k33_plus_grid();
        let r = solve(&g, &Config::for_genus(1)).unwrap();
        let d: Vec<_> = r.d_phase1.iter().chain(&r.d_preprocess).copied().collect();
        let covered: BTreeSet<_> = g.neighborhood_of_set(&d).unwrap().into_iter().collect();
        for &v in g.vertices() {
            assert_eq!(r.dom_map.contains_key(&v), !covered.contains(&v));
        }
        for (v, w) in &r.dom_map {
            assert!(v == w || g.has_edge(*v, *w));
        }
        assert!(g.is_dominating_set(&r.dominating_set()).unwrap());
    }
}
