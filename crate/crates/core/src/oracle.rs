//! Exact reference computations used to check the local algorithms.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bitset::BitSet;
use crate::graph::{Graph, GraphError, VertexId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("search budget of {budget} nodes exhausted; best dominating set found has size {}", best.len())]
    BudgetExhausted { budget: u64, best: Vec<VertexId> },
    #[error("graph has {n} vertices; the enumerator accepts at most {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// A minimum dominating set with its certificate of optimality.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleResult {
    pub gamma: usize,
    pub witness: Vec<VertexId>,
    pub explored_nodes: u64,
}

struct Mds<'g> {
    g: &'g Graph,
    closed: Vec<BitSet>,
    best: Vec<usize>,
    nodes: u64,
    budget: u64,
}

impl Mds<'_> {
    fn option_count(&self, u: usize, forbidden: &BitSet) -> usize {
        self.closed[u].count() - self.closed[u].intersection_count(forbidden)
    }

    /// Undominated vertices with pairwise disjoint option sets each need
    /// their own dominator.
    fn packing_bound(&self, undominated: &BitSet, forbidden: &BitSet) -> usize {
        let n = self.g.num_vertices();
        let mut claimed = BitSet::new(n);
        let mut count = 0;
        for u in undominated.iter() {
            let mut opts = self.closed[u].clone();
            opts.difference_with(forbidden);
            if !opts.intersects(&claimed) {
                claimed.union_with(&opts);
                count += 1;
            }
        }
        count
    }

    fn branch(
        &mut self,
        undominated: &BitSet,
        forbidden: &mut BitSet,
        chosen: &mut Vec<usize>,
    ) -> Result<(), ()> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(());
        }
        if undominated.is_empty() {
            if chosen.len() < self.best.len() {
                self.best = chosen.clone();
            }
            return Ok(());
        }
        if chosen.len() + self.packing_bound(undominated, forbidden) >= self.best.len() {
            return Ok(());
        }
        let u = undominated
            .iter()
            .min_by_key(|&u| self.option_count(u, forbidden))
            .expect("nonempty");
        let mut opts: Vec<usize> = std::iter::once(u)
            .chain(self.g.neighbor_indices(u).iter().copied())
            .filter(|&w| !forbidden.contains(w))
            .collect();
        if opts.is_empty() {
            return Ok(());
        }
        opts.sort_by_key(|&w| std::cmp::Reverse(self.closed[w].intersection_count(undominated)));
        let mut newly_forbidden = Vec::new();
        let mut result = Ok(());
        for w in opts {
            chosen.push(w);
            let mut rest = undominated.clone();
            rest.difference_with(&self.closed[w]);
            result = self.branch(&rest, forbidden, chosen);
            chosen.pop();
            if result.is_err() {
                break;
            }
            forbidden.insert(w);
            newly_forbidden.push(w);
        }
        for w in newly_forbidden {
            forbidden.remove(w);
        }
        result
    }
}

fn greedy_dominating(g: &Graph, closed: &[BitSet]) -> Vec<usize> {
    let n = g.num_vertices();
    let mut undominated = BitSet::full(n);
    let mut chosen = Vec::new();
    while !undominated.is_empty() {
        let w = (0..n)
            .max_by_key(|&w| (closed[w].intersection_count(&undominated), std::cmp::Reverse(w)))
            .expect("nonempty");
        undominated.difference_with(&closed[w]);
        chosen.push(w);
    }
    chosen
}

/// Minimum dominating set by branch and bound, limited to `budget` search
/// nodes.
pub fn exact_mds(g: &Graph, budget: u64) -> Result<OracleResult, OracleError> {
    let n = g.num_vertices();
    let closed: Vec<BitSet> = (0..n)
        .map(|i| {
            let mut s = BitSet::new(n);
            s.insert(i);
            g.neighbor_indices(i).iter().for_each(|&j| s.insert(j));
            s
        })
        .collect();
    let mut mds = Mds {
        g,
        best: greedy_dominating(g, &closed),
        closed,
        nodes: 0,
        budget,
    };
    let to_ids = |set: &[usize]| {
        let mut v: Vec<VertexId> = set.iter().map(|&i| g.id_at(i)).collect();
        v.sort_unstable();
        v
    };
    let outcome = mds.branch(&BitSet::full(n), &mut BitSet::new(n), &mut Vec::new());
    if outcome.is_err() {
        return Err(OracleError::BudgetExhausted {
            budget,
            best: to_ids(&mds.best),
        });
    }
    Ok(OracleResult {
        gamma: mds.best.len(),
        witness: to_ids(&mds.best),
        explored_nodes: mds.nodes,
    })
}

/// Is there `A ⊆ V ∖ {v}` with `|A| <= k` and `N(v) ⊆ N[A]`? Exhaustive
/// over all vertices of the graph, with no locality restriction.
pub fn exact_coverage(g: &Graph, v: VertexId, k: usize) -> Result<bool, OracleError> {
    let vi = g.index_of(v).ok_or(GraphError::UnknownVertex(v))?;
    let targets = g.neighbor_indices(vi);
    let n = g.num_vertices();
    let cover: Vec<BitSet> = (0..n)
        .map(|a| {
            let mut s = BitSet::new(targets.len());
            for (p, &w) in targets.iter().enumerate() {
                if w == a || g.neighbor_indices(a).binary_search(&w).is_ok() {
                    s.insert(p);
                }
            }
            s
        })
        .collect();
    let pool: Vec<usize> = (0..n).filter(|&a| a != vi).collect();
    fn rec(pool: &[usize], cover: &[BitSet], left: &BitSet, k: usize, from: usize) -> bool {
        if left.is_empty() {
            return true;
        }
        if k == 0 {
            return false;
        }
        for i in from..pool.len() {
            let mut rest = left.clone();
            rest.difference_with(&cover[pool[i]]);
            if rec(pool, cover, &rest, k - 1, i + 1) {
                return true;
            }
        }
        false
    }
    Ok(rec(&pool, &cover, &BitSet::full(targets.len()), k, 0))
}

/// First-phase set with the constant 6, evaluated on the whole graph.
pub fn literal_phase1(g: &Graph) -> Result<Vec<VertexId>, OracleError> {
    let mut d = Vec::new();
    for &v in g.vertices() {
        if !exact_coverage(g, v, 6)? {
            d.push(v);
        }
    }
    Ok(d)
}

pub const NAIVE_MINOR_LIMIT: usize = 12;

/// Is `K_{t,3}` a depth-1 minor of `g`? Enumerates every labelling of the
/// vertices with "unused" or a target vertex and checks that the label
/// classes are stars with all required edges between them.
pub fn naive_depth1_minor(g: &Graph, t: usize) -> Result<bool, OracleError> {
    let n = g.num_vertices();
    if n > NAIVE_MINOR_LIMIT {
        return Err(OracleError::TooLarge {
            n,
            limit: NAIVE_MINOR_LIMIT,
        });
    }
    let k = t + 3;
    if n < k {
        return Ok(false);
    }
    let closed: Vec<u32> = (0..n)
        .map(|i| {
            g.neighbor_indices(i)
                .iter()
                .fold(1u32 << i, |m, &j| m | 1 << j)
        })
        .collect();
    let mut labeler = Labeler {
        n,
        t,
        closed,
        class: vec![0; k],
        used_a: 0,
        used_b: 0,
    };
    Ok(labeler.assign(0))
}

struct Labeler {
    n: usize,
    t: usize,
    closed: Vec<u32>,
    class: Vec<u32>,
    used_a: usize,
    used_b: usize,
}

impl Labeler {
    fn can_be_star(&self, set: u32, future: u32) -> bool {
        if set.count_ones() <= 1 {
            return true;
        }
        let mut cands = set | future;
        while cands != 0 {
            let c = cands.trailing_zeros() as usize;
            cands &= cands - 1;
            if set & !self.closed[c] == 0 {
                return true;
            }
        }
        false
    }

    fn touches(&self, x: u32, y: u32) -> bool {
        let mut xs = x;
        while xs != 0 {
            let i = xs.trailing_zeros() as usize;
            xs &= xs - 1;
            if self.closed[i] & y != 0 {
                return true;
            }
        }
        false
    }

    fn complete(&self) -> bool {
        self.class.iter().all(|&c| c != 0 && self.can_be_star(c, 0))
            && (0..self.t).all(|a| (self.t..self.t + 3).all(|b| self.touches(self.class[a], self.class[b])))
    }

    fn assign(&mut self, x: usize) -> bool {
        let k = self.t + 3;
        let unused = (self.t - self.used_a) + (3 - self.used_b);
        if unused > self.n - x {
            return false;
        }
        if x == self.n {
            return self.complete();
        }
        let future = if x + 1 >= 32 { 0 } else { !0u32 << (x + 1) } & ((1u32 << self.n) - 1);
        if self.assign(x + 1) {
            return true;
        }
        // Labels within a side are interchangeable: only the next unused
        // label of a side may be opened.
        for h in 0..k {
            let is_a = h < self.t;
            let idx = if is_a { h } else { h - self.t };
            let opened = if is_a { self.used_a } else { self.used_b };
            if idx > opened {
                continue;
            }
            let opening = idx == opened;
            let set = self.class[h] | 1 << x;
            if !self.can_be_star(set, future) {
                continue;
            }
            let before = self.class[h];
            self.class[h] = set;
            if opening {
                if is_a {
                    self.used_a += 1;
                } else {
                    self.used_b += 1;
                }
            }
            let ok = self.assign(x + 1);
            if opening {
                if is_a {
                    self.used_a -= 1;
                } else {
                    self.used_b -= 1;
                }
            }
            self.class[h] = before;
            if ok {
                return true;
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u64) -> Graph {
        let mut e: Vec<_> = (1..n).map(|i| (i, i + 1)).collect();
        e.push((n, 1));
        Graph::from_edges(n, &e).unwrap()
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

    /// All subsets of size `k` of `0..n`, smallest first.
    fn dominates_with(g: &Graph, k: usize) -> bool {
        let n = g.num_vertices();
        let mut idx: Vec<usize> = (0..k).collect();
        loop {
            let set: Vec<VertexId> = idx.iter().map(|&i| g.id_at(i)).collect();
            if g.is_dominating_set(&set).unwrap() {
                return true;
            }
            let mut i = k;
            loop {
                if i == 0 {
                    return false;
                }
                i -= 1;
                if idx[i] < n - k + i {
                    break;
                }
            }
            idx[i] += 1;
            for j in i + 1..k {
                idx[j] = idx[j - 1] + 1;
            }
        }
    }

    #[test]
    fn mds_examples() {
        let star: Vec<_> = (2..=9).map(|l| (1, l)).collect();
        let star = Graph::from_edges(9, &star).unwrap();
        let r = exact_mds(&star, 1_000).unwrap();
        assert_eq!((r.gamma, r.witness.clone()), (1, vec![VertexId(1)]));
        assert_eq!(exact_mds(&cycle(5), 1_000).unwrap().gamma, 2);
        let g = grid(4, 4);
        let r = exact_mds(&g, 1_000_000).unwrap();
        assert_eq!(r.gamma, 4);
        assert!(g.is_dominating_set(&r.witness).unwrap());
        assert!(dominates_with(&g, 4));
        assert!(!dominates_with(&g, 3));
    }

    #[test]
    fn mds_budget_is_reported() {
        let g = grid(6, 6);
        match exact_mds(&g, 3) {
            Err(OracleError::BudgetExhausted { best, .. }) => {
                assert!(g.is_dominating_set(&best).unwrap())
            }
            other => panic!("expected budget error, got {other:?}"),
        }
    }

    #[test]
    fn mds_of_empty_and_isolated() {
        assert_eq!(exact_mds(&Graph::default(), 10).unwrap().gamma, 0);
        assert_eq!(exact_mds(&Graph::from_edges(4, &[]).unwrap(), 10).unwrap().gamma, 4);
    }

    #[test]
    fn coverage_examples() {
        let p = Graph::from_edges(3, &[(1, 2), (2, 3)]).unwrap();
        assert!(!exact_coverage(&p, VertexId(2), 1).unwrap());
        assert!(exact_coverage(&p, VertexId(2), 2).unwrap());
        let lone = Graph::from_edges(1, &[]).unwrap();
        assert!(exact_coverage(&lone, VertexId(1), 0).unwrap());
        let star: Vec<_> = (2..=21).map(|l| (1, l)).collect();
        let star = Graph::from_edges(21, &star).unwrap();
        assert!(!exact_coverage(&star, VertexId(1), 6).unwrap());
    }

    #[test]
    fn naive_minor_examples() {
        let mut k33 = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                k33.push((a, b));
            }
        }
        assert!(naive_depth1_minor(&Graph::from_edges(6, &k33).unwrap(), 3).unwrap());
        assert!(!naive_depth1_minor(&cycle(8), 3).unwrap());
        assert!(!naive_depth1_minor(&complete(5), 3).unwrap());
        assert!(naive_depth1_minor(&complete(6), 3).unwrap());
        assert!(naive_depth1_minor(&complete(7), 4).unwrap());
        assert!(!naive_depth1_minor(&complete(6), 4).unwrap());
        // planar, so no K_{3,3} minor of any depth; every star needs its
        // center inside the class
        let planar = [
            (1, 4), (1, 5), (1, 7), (2, 3), (2, 4), (2, 5), (2, 6), (2, 7),
            (3, 5), (3, 6), (3, 7), (4, 5), (4, 7), (5, 7), (6, 7),
        ];
        assert!(!naive_depth1_minor(&Graph::from_edges(7, &planar).unwrap(), 3).unwrap());
        assert!(naive_depth1_minor(&grid(4, 4), 3).is_err());
    }
}
