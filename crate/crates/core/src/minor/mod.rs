//! Depth-1 minors: star decompositions, star contraction, and exact
//! detection of `K_{t,3}` depth-1 minors.

pub mod genus;
pub mod planar;
pub(crate) mod search;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use search::{FirstModel, Host, Search};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MinorError {
    #[error("vertex {0} appears in more than one star")]
    Overlap(VertexId),
    #[error("leaf {leaf} is not adjacent to its center {center}")]
    DetachedLeaf { center: VertexId, leaf: VertexId },
    #[error("target vertex {0} has no star")]
    MissingBranch(VertexId),
    #[error("target edge {0}-{1} has no valid witness edge")]
    MissingWitness(VertexId, VertexId),
    #[error("t must be at least 3 (got {0})")]
    BadT(usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Pairwise disjoint stars, keyed by center. Leaves are sorted.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct StarDecomposition {
    pub stars: BTreeMap<VertexId, Vec<VertexId>>,
}

impl StarDecomposition {
    /// Checks disjointness and that every leaf is adjacent to its center.
    pub fn validate(&self, g: &Graph) -> Result<(), MinorError> {
        let mut seen = BTreeSet::new();
        for (&c, leaves) in &self.stars {
            g.degree(c)?;
            if !seen.insert(c) {
                return Err(MinorError::Overlap(c));
            }
            for &l in leaves {
                g.degree(l)?;
                if !seen.insert(l) {
                    return Err(MinorError::Overlap(l));
                }
                if !g.has_edge(c, l) {
                    return Err(MinorError::DetachedLeaf { center: c, leaf: l });
                }
            }
        }
        Ok(())
    }

    /// Center of the star containing `v`, if any.
    pub fn star_of(&self, v: VertexId) -> Option<VertexId> {
        self.stars
            .iter()
            .find(|(c, leaves)| **c == v || leaves.contains(&v))
            .map(|(c, _)| *c)
    }

    pub fn vertices(&self) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self
            .stars
            .iter()
            .flat_map(|(c, l)| std::iter::once(*c).chain(l.iter().copied()))
            .collect();
        all.sort_unstable();
        all
    }
}

/// Contracts every star of `dec` to its center. Vertices outside all stars
/// are kept; parallel edges and loops collapse.
pub fn contract(g: &Graph, dec: &StarDecomposition) -> Result<Graph, MinorError> {
    dec.validate(g)?;
    let mut rep: BTreeMap<VertexId, VertexId> = g.vertices().iter().map(|&v| (v, v)).collect();
    for (&c, leaves) in &dec.stars {
        for &l in leaves {
            rep.insert(l, c);
        }
    }
    let vertices: BTreeSet<VertexId> = rep.values().copied().collect();
    let edges: BTreeSet<(VertexId, VertexId)> = g
        .edges()
        .map(|(u, v)| (rep[&u], rep[&v]))
        .filter(|(a, b)| a != b)
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    Ok(Graph::new(vertices, edges)?)
}

/// Target edge and the host edge realizing it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeWitness {
    pub target: (VertexId, VertexId),
    pub host: (VertexId, VertexId),
}

/// A depth-1 minor model of `target` inside some host graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModel {
    pub target: Graph,
    pub decomposition: StarDecomposition,
    /// Target vertex to the center of its star.
    pub branch: BTreeMap<VertexId, VertexId>,
    pub edge_witnesses: Vec<EdgeWitness>,
}

impl MinorModel {
    pub fn vertices(&self) -> Vec<VertexId> {
        self.decomposition.vertices()
    }

    /// Independent re-check of every model invariant against `host`.
    pub fn verify(&self, host: &Graph) -> Result<(), MinorError> {
        self.decomposition.validate(host)?;
        for &h in self.target.vertices() {
            let c = self.branch.get(&h).ok_or(MinorError::MissingBranch(h))?;
            if !self.decomposition.stars.contains_key(c) {
                return Err(MinorError::MissingBranch(h));
            }
        }
        let centers: BTreeSet<_> = self.branch.values().collect();
        if centers.len() != self.branch.len() {
            let dup = *self.branch.values().next().unwrap();
            return Err(MinorError::Overlap(dup));
        }
        for (a, b) in self.target.edges() {
            let ok = self.edge_witnesses.iter().any(|w| {
                let (x, y) = w.host;
                let (ca, cb) = (self.branch[&a], self.branch[&b]);
                let sx = self.decomposition.star_of(x);
                let sy = self.decomposition.star_of(y);
                host.has_edge(x, y)
                    && ((w.target == (a, b) || w.target == (b, a))
                        && ((sx == Some(ca) && sy == Some(cb)) || (sx == Some(cb) && sy == Some(ca))))
            });
            if !ok {
                return Err(MinorError::MissingWitness(a, b));
            }
        }
        Ok(())
    }
}

/// `K_{t,3}` with side `A = 1..=t` and side `B = t+1..=t+3`.
pub fn k_t3(t: usize) -> Graph {
    let t = t as u64;
    let edges: Vec<(u64, u64)> = (1..=t)
        .flat_map(|a| (t + 1..=t + 3).map(move |b| (a, b)))
        .collect();
    Graph::from_edges(t + 3, &edges).expect("complete bipartite graph is simple")
}

/// Builds a [`MinorModel`] from search output on a host subgraph.
pub(crate) fn model_from_search(
    host: &Graph,
    t: usize,
    centers: &[usize],
    members: &[Vec<usize>],
) -> MinorModel {
    let target = k_t3(t);
    let mut stars = BTreeMap::new();
    let mut branch = BTreeMap::new();
    for (h, &c) in centers.iter().enumerate() {
        let mut leaves: Vec<VertexId> = members[h]
            .iter()
            .filter(|&&x| x != c)
            .map(|&x| host.id_at(x))
            .collect();
        leaves.sort_unstable();
        stars.insert(host.id_at(c), leaves);
        branch.insert(VertexId(h as u64 + 1), host.id_at(c));
    }
    let mut edge_witnesses = Vec::new();
    for a in 0..t {
        for b in t..t + 3 {
            let w = members[a]
                .iter()
                .flat_map(|&x| members[b].iter().map(move |&y| (x, y)))
                .filter(|&(x, y)| host.neighbor_indices(x).binary_search(&y).is_ok())
                .min()
                .expect("search only reports complete models");
            edge_witnesses.push(EdgeWitness {
                target: (VertexId(a as u64 + 1), VertexId(b as u64 + 1)),
                host: (host.id_at(w.0), host.id_at(w.1)),
            });
        }
    }
    MinorModel {
        target,
        decomposition: StarDecomposition { stars },
        branch,
        edge_witnesses,
    }
}

/// Exact search for a depth-1 model of `K_{t,3}` in `g`.
///
/// A model of a 2-connected target lies inside one biconnected block, and
/// the block must be nonplanar, so only nonplanar blocks are searched.
pub fn has_k_t3_depth1_minor(g: &Graph, t: usize) -> Result<Option<MinorModel>, MinorError> {
    if t < 3 {
        return Err(MinorError::BadT(t));
    }
    let k = t + 3;
    for block in planar::blocks(g) {
        if block.len() < k {
            continue;
        }
        let sub = g.induced_by_indices(&block);
        if sub.num_edges() < 3 * t || planar::is_planar(&sub) {
            continue;
        }
        let host = Host::new(&sub);
        let budget = (sub.num_vertices() - k).min(6 * t);
        let mut search = Search::new(&host, t, budget, FirstModel::default());
        if search.run().is_break() {
            let (centers, members) = search.visitor.found.take().unwrap();
            let model = model_from_search(&sub, t, &centers, &members);
            model.verify(g)?;
            return Ok(Some(model));
        }
    }
    Ok(None)
}

/// True iff `g` excludes `K_{t,3}` as a depth-1 minor.
pub fn is_locally_embeddable(g: &Graph, t: usize) -> Result<bool, MinorError> {
    Ok(has_k_t3_depth1_minor(g, t)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::ids;

    fn complete(n: u64) -> Graph {
        let mut e = Vec::new();
        for a in 1..=n {
            for b in a + 1..=n {
                e.push((a, b));
            }
        }
        Graph::from_edges(n, &e).unwrap()
    }

    fn torus(r: u64, c: u64) -> Graph {
        let id = |i: u64, j: u64| (i % r) * c + (j % c) + 1;
        let mut e = Vec::new();
        for i in 0..r {
            for j in 0..c {
                e.push((id(i, j), id(i, j + 1)));
                e.push((id(i, j), id(i + 1, j)));
            }
        }
        Graph::from_edges(r * c, &e).unwrap()
    }

    fn dec(stars: &[(u64, &[u64])]) -> StarDecomposition {
        StarDecomposition {
            stars: stars.iter().map(|&(c, l)| (VertexId(c), ids(l))).collect(),
        }
    }

    #[test]
    fn contraction_examples() {
        let p3 = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        let c = contract(&p3, &dec(&[(2, &[3])])).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges()), (2, 1));

        let star = Graph::from_edges(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
        let c = contract(&star, &dec(&[(1, &[2, 3, 4, 5])])).unwrap();
        assert_eq!((c.num_vertices(), c.num_edges()), (1, 0));

        let c6 = Graph::from_edges(6, &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)]).unwrap();
        let c = contract(&c6, &dec(&[(1, &[2]), (3, &[4]), (5, &[6])])).unwrap();
        assert_eq!(c, complete(3).relabel(|v| VertexId(2 * v.0 - 1)).unwrap());
    }

    #[test]
    fn contraction_rejects_bad_decompositions() {
        let p3 = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        assert_eq!(
            contract(&p3, &dec(&[(1, &[2]), (3, &[2])])),
            Err(MinorError::Overlap(VertexId(2)))
        );
        assert_eq!(
            contract(&p3, &dec(&[(1, &[3])])),
            Err(MinorError::DetachedLeaf {
                center: VertexId(1),
                leaf: VertexId(3)
            })
        );
    }

    #[test]
    fn k33_detects_itself() {
        let m = has_k_t3_depth1_minor(&k_t3(3), 3).unwrap().unwrap();
        assert!(m.decomposition.stars.values().all(Vec::is_empty));
        assert_eq!(m.edge_witnesses.len(), 9);
        assert!(!is_locally_embeddable(&k_t3(3), 3).unwrap());
    }

    #[test]
    fn trees_and_grids_are_locally_embeddable() {
        let tree = Graph::from_edges(7, &[(1, 2), (1, 3), (2, 4), (2, 5), (3, 6), (3, 7)]).unwrap();
        assert!(is_locally_embeddable(&tree, 3).unwrap());
        let mut grid = Vec::new();
        for r in 0..5u64 {
            for c in 0..5u64 {
                let v = r * 5 + c + 1;
                if c < 4 {
                    grid.push((v, v + 1));
                }
                if r < 4 {
                    grid.push((v, v + 5));
                }
            }
        }
        assert!(is_locally_embeddable(&Graph::from_edges(25, &grid).unwrap(), 3).unwrap());
    }

    #[test]
    fn complete_graphs() {
        assert!(!is_locally_embeddable(&complete(6), 3).unwrap());
        assert!(is_locally_embeddable(&complete(5), 3).unwrap());
    }

    #[test]
    fn toroidal_grid_excludes_k73() {
        assert_eq!(has_k_t3_depth1_minor(&torus(4, 4), 7).unwrap(), None);
    }

    #[test]
    fn models_verify_and_reject_tampering() {
        let g = complete(7);
        let m = has_k_t3_depth1_minor(&g, 4).unwrap().unwrap();
        m.verify(&g).unwrap();
        let mut bad = m.clone();
        bad.edge_witnesses.pop();
        assert!(matches!(bad.verify(&g), Err(MinorError::MissingWitness(..))));
    }

    #[test]
    fn bad_t_is_an_error() {
        assert_eq!(has_k_t3_depth1_minor(&complete(4), 2), Err(MinorError::BadT(2)));
    }
}
