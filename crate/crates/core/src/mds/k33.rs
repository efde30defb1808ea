//! Canonical `K_{3,3}` witness subgraph of a vertex.
//!
//! `K_v` is the vertex set of a smallest depth-1 model of `K_{3,3}` that
//! lies in `G[N⁶[v]]` and contains `v`; ties go to the lexicographically
//! smallest sorted ID list. Any such model has at most 24 vertices.
//!
//! The answer does not depend on how the search is organised, so vertices
//! whose candidate host is the same nonplanar block share one search over
//! that block. [`KvCache`] keeps those shared results.

use std::collections::HashMap;
use std::ops::ControlFlow;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::graph::{Graph, GraphError, VertexId};
use crate::minor::planar;
use crate::minor::search::{Host, Search, State, Visitor};
use crate::minor::{model_from_search, MinorModel};

pub const KV_RADIUS: usize = 6;
pub const KV_MAX_VERTICES: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CanonicalK33 {
    /// Sorted vertex set of `K_v`.
    pub vertices: Vec<VertexId>,
    pub model: MinorModel,
}

impl CanonicalK33 {
    pub fn subgraph(&self, g: &Graph) -> Result<Graph, GraphError> {
        g.induced_subgraph(&self.vertices)
    }
}

type Key = (usize, Vec<VertexId>);
type Stars = (Vec<usize>, Vec<Vec<usize>>);

/// Smallest sorted ID sequence of length `size` containing `q`.
fn lex_floor(graph: &Graph, q: &crate::bitset::BitSet, size: usize) -> Vec<VertexId> {
    let mut fill = size - q.count();
    let mut out = Vec::with_capacity(size);
    for i in 0..graph.num_vertices() {
        if q.contains(i) {
            out.push(graph.id_at(i));
        } else if fill > 0 {
            fill -= 1;
            out.push(graph.id_at(i));
        }
        if out.len() == size {
            break;
        }
    }
    out
}

/// The stars of a found model with `x` added as a leaf when it is not yet
/// used: it joins the smallest-ID adjacent center. `None` if no center is
/// adjacent.
fn with_vertex(graph: &Graph, s: &State<'_>, x: usize) -> Option<Vec<Vec<usize>>> {
    let mut members = s.members.to_vec();
    if !s.used.contains(x) {
        let h = (0..s.center.len())
            .filter(|&h| graph.neighbor_indices(x).binary_search(&s.center[h]).is_ok())
            .min_by_key(|&h| s.center[h])?;
        members[h].push(x);
    }
    Some(members)
}

fn key_of(graph: &Graph, members: &[Vec<usize>]) -> Key {
    let mut set: Vec<usize> = members.iter().flatten().copied().collect();
    set.sort_unstable();
    (set.len(), set.iter().map(|&i| graph.id_at(i)).collect())
}

/// Best model containing one vertex.
struct Canon<'a> {
    graph: &'a Graph,
    v: usize,
    /// Best key so far, from this host or an earlier one.
    best: Option<Key>,
    stars: Option<Stars>,
}

impl Visitor for Canon<'_> {
    fn leaf_cap(&self) -> usize {
        self.best.as_ref().map_or(usize::MAX, |(size, _)| size - 6)
    }

    fn prune(&mut self, s: &State<'_>) -> bool {
        let Some((size, best)) = &self.best else {
            return false;
        };
        let mut q = s.used.clone();
        q.insert(self.v);
        let qn = q.count();
        if qn != *size {
            return qn > *size;
        }
        // Every completion has exactly `size` vertices.
        lex_floor(self.graph, &q, *size) >= *best
    }

    fn visit(&mut self, s: &State<'_>) -> ControlFlow<()> {
        if let Some(members) = with_vertex(self.graph, s, self.v) {
            let key = key_of(self.graph, &members);
            if self.best.as_ref().is_none_or(|b| key < *b) {
                self.best = Some(key);
                self.stars = Some((s.center.to_vec(), members));
            }
        }
        ControlFlow::Continue(())
    }
}

/// Best model for every vertex of a host at once.
struct AllCanon<'a> {
    graph: &'a Graph,
    best: Vec<Option<(Key, Stars)>>,
    /// Largest best size, or `KV_MAX_VERTICES` while some vertex has none.
    worst: usize,
}

impl AllCanon<'_> {
    fn offer(&mut self, x: usize, center: &[usize], members: Vec<Vec<usize>>) {
        let key = key_of(self.graph, &members);
        if self.best[x].as_ref().is_none_or(|(b, _)| key < *b) {
            self.best[x] = Some((key, (center.to_vec(), members)));
        }
    }
}

impl Visitor for AllCanon<'_> {
    fn leaf_cap(&self) -> usize {
        self.worst - 6
    }

    fn prune(&mut self, s: &State<'_>) -> bool {
        s.used.count() > self.worst
    }

    fn visit(&mut self, s: &State<'_>) -> ControlFlow<()> {
        for x in 0..self.graph.num_vertices() {
            if let Some(members) = with_vertex(self.graph, s, x) {
                self.offer(x, s.center, members);
            }
        }
        self.worst = self
            .best
            .iter()
            .map(|b| b.as_ref().map_or(KV_MAX_VERTICES, |(k, _)| k.0))
            .max()
            .unwrap_or(KV_MAX_VERTICES);
        ControlFlow::Continue(())
    }
}

/// A host that can carry a model containing `v`.
enum Candidate {
    /// A nonplanar block of the ball that contains `v`.
    Block(Graph),
    /// A nonplanar block within distance 2, plus `v` and its neighbors
    /// touching it.
    Extended(Graph),
}

fn hosts(ball: &Graph, v: usize) -> Vec<Candidate> {
    let dist = ball.distances_from(v, 2);
    let mut out = Vec::new();
    for block in planar::blocks(ball) {
        if block.len() < 6 {
            continue;
        }
        let sub = ball.induced_by_indices(&block);
        if sub.num_edges() < 9 || planar::is_planar(&sub) {
            continue;
        }
        if block.binary_search(&v).is_ok() {
            out.push(Candidate::Block(sub));
            continue;
        }
        if !block.iter().any(|&b| dist[b].is_some()) {
            continue;
        }
        let mut members = block.clone();
        members.push(v);
        for &c in ball.neighbor_indices(v) {
            if block.binary_search(&c).is_err()
                && ball.neighbor_indices(c).iter().any(|x| block.binary_search(x).is_ok())
            {
                members.push(c);
            }
        }
        out.push(Candidate::Extended(ball.induced_by_indices(&members)));
    }
    out
}

fn leaf_budget(host: &Host) -> usize {
    (KV_MAX_VERTICES - 6).min(host.n.saturating_sub(6))
}

fn offer(ids: Vec<VertexId>, model: MinorModel, best: &mut Option<(Vec<VertexId>, MinorModel)>) {
    if best.as_ref().is_none_or(|(b, _)| (ids.len(), &ids) < (b.len(), b)) {
        *best = Some((ids, model));
    }
}

type BlockResult = Vec<Option<(Key, MinorModel)>>;

fn solve_block(graph: &Graph) -> BlockResult {
    let host = Host::new(graph);
    let all = AllCanon {
        graph,
        best: vec![None; graph.num_vertices()],
        worst: KV_MAX_VERTICES,
    };
    let mut search = Search::new(&host, 3, leaf_budget(&host), all);
    let _ = search.run();
    search
        .visitor
        .best
        .into_iter()
        .map(|b| b.map(|(key, (centers, members))| (key, model_from_search(graph, 3, &centers, &members))))
        .collect()
}

type BlockKey = (Vec<VertexId>, Vec<(VertexId, VertexId)>);

/// Shared per-block results, keyed by the block's vertices and edges.
#[derive(Default)]
pub struct KvCache {
    blocks: Mutex<HashMap<BlockKey, Arc<OnceLock<BlockResult>>>>,
}

impl KvCache {
    pub fn new() -> Self {
        Self::default()
    }

    fn block(&self, graph: &Graph) -> Arc<OnceLock<BlockResult>> {
        let key = (graph.vertices().to_vec(), graph.edges().collect());
        let mut map = self.blocks.lock().unwrap_or_else(|e| e.into_inner());
        map.entry(key).or_default().clone()
    }
}

/// Canonical `K_v` of `v` in `g`, or `None` when no depth-1 model of
/// `K_{3,3}` inside the 6-ball of `v` contains `v`.
pub fn find_canonical_k33(g: &Graph, v: VertexId) -> Result<Option<CanonicalK33>, GraphError> {
    canonical(g, v, None)
}

/// [`find_canonical_k33`] for many vertices of one graph: blocks are
/// searched once for all their vertices and kept in `cache`.
pub fn find_canonical_k33_cached(
    g: &Graph,
    v: VertexId,
    cache: &KvCache,
) -> Result<Option<CanonicalK33>, GraphError> {
    canonical(g, v, Some(cache))
}

fn canonical(g: &Graph, v: VertexId, cache: Option<&KvCache>) -> Result<Option<CanonicalK33>, GraphError> {
    let ball = g.closed_ball(v, KV_RADIUS)?.subgraph;
    let vi = ball.index_of(v).expect("center is in its ball");
    let mut best: Option<(Vec<VertexId>, MinorModel)> = None;
    for candidate in hosts(&ball, vi) {
        match (candidate, cache) {
            (Candidate::Block(graph), Some(cache)) => {
                let cell = cache.block(&graph);
                let result = cell.get_or_init(|| solve_block(&graph));
                let local = graph.index_of(v).expect("block contains v");
                if let Some(((_, ids), model)) = &result[local] {
                    offer(ids.clone(), model.clone(), &mut best);
                }
            }
            (Candidate::Block(graph) | Candidate::Extended(graph), _) => {
                let host = Host::new(&graph);
                let local = graph.index_of(v).expect("host contains v");
                let canon = Canon {
                    graph: &graph,
                    v: local,
                    best: best.as_ref().map(|(ids, _)| (ids.len(), ids.clone())),
                    stars: None,
                };
                let mut search = Search::new(&host, 3, leaf_budget(&host), canon);
                let _ = search.run();
                let canon = search.visitor;
                if let (Some((_, ids)), Some((centers, members))) = (canon.best, canon.stars) {
                    offer(ids, model_from_search(&graph, 3, &centers, &members), &mut best);
                }
            }
        }
    }
    Ok(best.map(|(vertices, model)| {
        debug_assert!(model.verify(g).is_ok());
        CanonicalK33 { vertices, model }
    }))
}
