//! Immutable simple undirected graphs with stable vertex IDs.
//!
//! Vertices are stored in ascending ID order and addressed internally by
//! their position in that order (an "index"). Every set-valued query returns
//! IDs in ascending order, so downstream computations are replayable.

use std::collections::VecDeque;
use std::fmt;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Unique, positive vertex identifier. The total order on IDs is the order
/// used for every tie-break in the algorithms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(pub u64);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u64> for VertexId {
    fn from(v: u64) -> Self {
        VertexId(v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("vertex id 0 is not allowed (ids are positive)")]
    ZeroId,
    #[error("duplicate vertex {0}")]
    DuplicateVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
    #[error("operation requires a nonempty graph")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(try_from = "GraphRepr", into = "GraphRepr")]
pub struct Graph {
    ids: Vec<VertexId>,
    adj: Vec<Vec<usize>>,
    num_edges: usize,
}

/// Serialized form: sorted vertex list plus sorted `u < v` edge list.
#[derive(Serialize, Deserialize)]
struct GraphRepr {
    vertices: Vec<VertexId>,
    edges: Vec<(VertexId, VertexId)>,
}

impl From<Graph> for GraphRepr {
    fn from(g: Graph) -> Self {
        GraphRepr {
            edges: g.edges().collect(),
            vertices: g.ids,
        }
    }
}

impl TryFrom<GraphRepr> for Graph {
    type Error = GraphError;
    fn try_from(r: GraphRepr) -> Result<Self, GraphError> {
        Graph::new(r.vertices, r.edges)
    }
}

/// The radius-`r` ball around `center`: the induced graph on `N^r[center]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ball {
    pub center: VertexId,
    pub radius: usize,
    pub subgraph: Graph,
}

impl Graph {
    pub fn new<V, E>(vertices: V, edges: E) -> Result<Self, GraphError>
    where
        V: IntoIterator<Item = VertexId>,
        E: IntoIterator<Item = (VertexId, VertexId)>,
    {
        let mut ids: Vec<VertexId> = vertices.into_iter().collect();
        ids.sort_unstable();
        for w in ids.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateVertex(w[0]));
            }
        }
        if ids.first() == Some(&VertexId(0)) {
            return Err(GraphError::ZeroId);
        }
        let mut adj = vec![Vec::new(); ids.len()];
        let mut num_edges = 0;
        for (u, v) in edges {
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            let iu = ids.binary_search(&u).map_err(|_| GraphError::UnknownVertex(u))?;
            let iv = ids.binary_search(&v).map_err(|_| GraphError::UnknownVertex(v))?;
            adj[iu].push(iv);
            adj[iv].push(iu);
            num_edges += 1;
        }
        for (i, list) in adj.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let (a, b) = (ids[i].min(ids[w[0]]), ids[i].max(ids[w[0]]));
                return Err(GraphError::DuplicateEdge(a, b));
            }
        }
        Ok(Graph { ids, adj, num_edges })
    }

    /// Vertices `1..=n` with the given edges.
    pub fn from_edges(n: u64, edges: &[(u64, u64)]) -> Result<Self, GraphError> {
        Graph::new(
            (1..=n).map(VertexId),
            edges.iter().map(|&(u, v)| (VertexId(u), VertexId(v))),
        )
    }

    /// Builds a graph from index-level adjacency that is already simple,
    /// symmetric and sorted. Used by subgraph constructors.
    fn from_parts(ids: Vec<VertexId>, adj: Vec<Vec<usize>>) -> Self {
        let num_edges = adj.iter().map(Vec::len).sum::<usize>() / 2;
        Graph { ids, adj, num_edges }
    }

    pub fn num_vertices(&self) -> usize {
        self.ids.len()
    }

    pub fn num_edges(&self) -> usize {
        self.num_edges
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// All vertex IDs in ascending order.
    pub fn vertices(&self) -> &[VertexId] {
        &self.ids
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.index_of(v).is_some()
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    fn require(&self, v: VertexId) -> Result<usize, GraphError> {
        self.index_of(v).ok_or(GraphError::UnknownVertex(v))
    }

    pub fn id_at(&self, i: usize) -> VertexId {
        self.ids[i]
    }

    /// Sorted neighbor indices of the vertex at index `i`.
    pub fn neighbor_indices(&self, i: usize) -> &[usize] {
        &self.adj[i]
    }

    pub fn degree(&self, v: VertexId) -> Result<usize, GraphError> {
        Ok(self.adj[self.require(v)?].len())
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        match (self.index_of(u), self.index_of(v)) {
            (Some(iu), Some(iv)) => self.adj[iu].binary_search(&iv).is_ok(),
            _ => false,
        }
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId)> + '_ {
        self.adj.iter().enumerate().flat_map(move |(i, list)| {
            list.iter()
                .filter(move |&&j| j > i)
                .map(move |&j| (self.ids[i], self.ids[j]))
        })
    }

    /// Open neighborhood `N(v)`.
    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, GraphError> {
        let i = self.require(v)?;
        Ok(self.adj[i].iter().map(|&j| self.ids[j]).collect())
    }

    /// BFS distances from index `source`, truncated at `limit` hops.
    pub fn distances_from(&self, source: usize, limit: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.ids.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(u) = queue.pop_front() {
            let d = dist[u].unwrap();
            if d == limit {
                continue;
            }
            for &w in &self.adj[u] {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    pub fn closed_ball(&self, v: VertexId, r: usize) -> Result<Ball, GraphError> {
        let i = self.require(v)?;
        let members: Vec<usize> = self
            .distances_from(i, r)
            .iter()
            .enumerate()
            .filter_map(|(j, d)| d.map(|_| j))
            .collect();
        Ok(Ball {
            center: v,
            radius: r,
            subgraph: self.induced_by_indices(&members),
        })
    }

    /// Closed neighborhood `N[A]` of a vertex set.
    pub fn neighborhood_of_set(&self, set: &[VertexId]) -> Result<Vec<VertexId>, GraphError> {
        let mut mark = vec![false; self.ids.len()];
        for &v in set {
            let i = self.require(v)?;
            mark[i] = true;
            for &j in &self.adj[i] {
                mark[j] = true;
            }
        }
        Ok(self.collect_marked(&mark))
    }

    pub fn is_dominating_set(&self, set: &[VertexId]) -> Result<bool, GraphError> {
        Ok(self.neighborhood_of_set(set)?.len() == self.ids.len())
    }

    /// Exact edge density `|E| / |V|`.
    pub fn edge_density(&self) -> Result<Ratio<u64>, GraphError> {
        if self.ids.is_empty() {
            return Err(GraphError::Empty);
        }
        Ok(Ratio::new(self.num_edges as u64, self.ids.len() as u64))
    }

    /// Induced subgraph on the given vertex indices; IDs are preserved.
    pub fn induced_by_indices(&self, members: &[usize]) -> Graph {
        let mut members = members.to_vec();
        members.sort_unstable();
        members.dedup();
        let mut local = vec![usize::MAX; self.ids.len()];
        for (k, &i) in members.iter().enumerate() {
            local[i] = k;
        }
        let adj = members
            .iter()
            .map(|&i| {
                self.adj[i]
                    .iter()
                    .filter_map(|&j| (local[j] != usize::MAX).then_some(local[j]))
                    .collect()
            })
            .collect();
        Graph::from_parts(members.iter().map(|&i| self.ids[i]).collect(), adj)
    }

    pub fn induced_subgraph(&self, vertices: &[VertexId]) -> Result<Graph, GraphError> {
        let idx = vertices
            .iter()
            .map(|&v| self.require(v))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(self.induced_by_indices(&idx))
    }

    /// `G - S`: the induced subgraph on the vertices outside `removed`.
    /// IDs in `removed` that are not in the graph are ignored.
    pub fn without_vertices(&self, removed: &[VertexId]) -> Graph {
        let mut drop = vec![false; self.ids.len()];
        for &v in removed {
            if let Some(i) = self.index_of(v) {
                drop[i] = true;
            }
        }
        let keep: Vec<usize> = (0..self.ids.len()).filter(|&i| !drop[i]).collect();
        self.induced_by_indices(&keep)
    }

    /// Applies a strictly increasing or arbitrary injective relabeling.
    pub fn relabel<F: Fn(VertexId) -> VertexId>(&self, f: F) -> Result<Graph, GraphError> {
        Graph::new(
            self.ids.iter().map(|&v| f(v)),
            self.edges().map(|(u, v)| (f(u), f(v))),
        )
    }

    fn collect_marked(&self, mark: &[bool]) -> Vec<VertexId> {
        mark.iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(self.ids[i]))
            .collect()
    }
}

#[cfg(test)]
pub(crate) fn ids(raw: &[u64]) -> Vec<VertexId> {
    raw.iter().map(|&v| VertexId(v)).collect()
}
