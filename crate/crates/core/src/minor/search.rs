//! Exact backtracking search for depth-1 models of `K_{t,3}`.
//!
//! The target has an `A` side of `t` vertices (degree 3) and a `B` side of
//! three vertices (degree `t`). A model assigns every target vertex a star
//! in the host: a center plus leaves adjacent to it, all stars disjoint, with
//! a host edge between the stars of every `A`-`B` pair.
//!
//! Centers are placed first, interleaving the sides (`B0, A0, B1, A1, B2,
//! A2, ...`) with ascending centers within a side. Opposite centers must be
//! within distance 3. Then leaves are added one unsatisfied pair at a time,
//! always branching on the pair with the fewest completions.

use std::ops::ControlFlow;

use crate::bitset::BitSet;
use crate::graph::Graph;

const NONE: usize = usize::MAX;
const FAR: u8 = u8::MAX;
const IMPOSSIBLE: usize = usize::MAX;

/// Dense copy of a (small) host graph with capped distances.
pub(crate) struct Host {
    pub n: usize,
    pub adj: Vec<Vec<usize>>,
    nbr: Vec<BitSet>,
    dist: Vec<Vec<u8>>,
}

impl Host {
    pub fn new(g: &Graph) -> Self {
        let n = g.num_vertices();
        let adj: Vec<Vec<usize>> = (0..n).map(|i| g.neighbor_indices(i).to_vec()).collect();
        let nbr = adj
            .iter()
            .map(|list| {
                let mut s = BitSet::new(n);
                list.iter().for_each(|&j| s.insert(j));
                s
            })
            .collect();
        let dist = (0..n)
            .map(|i| {
                g.distances_from(i, 3)
                    .into_iter()
                    .map(|d| d.map_or(FAR, |d| d as u8))
                    .collect()
            })
            .collect();
        Host { n, adj, nbr, dist }
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.nbr[u].contains(v)
    }

    /// Fewest leaves a star centered at `x` needs to touch `req` other stars.
    fn min_leaves(&self, x: usize, req: usize) -> usize {
        let d = self.adj[x].len();
        let mut extra: Vec<usize> = self.adj[x].iter().map(|&y| self.adj[y].len() - 1).collect();
        extra.sort_unstable_by(|a, b| b.cmp(a));
        let mut gain = 0;
        for l in 0..=d {
            if d - l + gain >= req {
                return l;
            }
            if l < d {
                gain += extra[l];
            }
        }
        IMPOSSIBLE
    }
}

/// Read-only snapshot handed to a [`Visitor`].
pub(crate) struct State<'s> {
    pub center: &'s [usize],
    pub members: &'s [Vec<usize>],
    pub used: &'s BitSet,
}

pub(crate) trait Visitor {
    /// Called at every leaf-phase node; `true` cuts the subtree.
    fn prune(&mut self, _state: &State<'_>) -> bool {
        false
    }

    /// Upper bound on the number of leaves of models still of interest.
    fn leaf_cap(&self) -> usize {
        usize::MAX
    }

    /// Called for every complete model found.
    fn visit(&mut self, state: &State<'_>) -> ControlFlow<()>;
}

pub(crate) struct Search<'h, V: Visitor> {
    host: &'h Host,
    t: usize,
    k: usize,
    order: Vec<usize>,
    center: Vec<usize>,
    owner: Vec<usize>,
    members: Vec<Vec<usize>>,
    used: BitSet,
    forbid: Vec<u64>,
    cnt: Vec<u32>,
    budget: usize,
    leaves: usize,
    min_a: Vec<usize>,
    min_b: Vec<usize>,
    pub visitor: V,
    pub nodes: u64,
}

impl<'h, V: Visitor> Search<'h, V> {
    /// `budget` is the maximum number of leaves over all stars.
    pub fn new(host: &'h Host, t: usize, budget: usize, visitor: V) -> Self {
        assert!((3..=60).contains(&t));
        let k = t + 3;
        let mut order = Vec::with_capacity(k);
        for i in 0..t {
            if i < 3 {
                order.push(t + i);
            }
            order.push(i);
        }
        Search {
            host,
            t,
            k,
            order,
            center: vec![NONE; k],
            owner: vec![NONE; host.n],
            members: vec![Vec::new(); k],
            used: BitSet::new(host.n),
            forbid: vec![0; host.n],
            cnt: vec![0; 3 * t],
            budget,
            leaves: 0,
            min_a: (0..host.n).map(|x| host.min_leaves(x, 3)).collect(),
            min_b: (0..host.n).map(|x| host.min_leaves(x, t)).collect(),
            visitor,
            nodes: 0,
        }
    }

    pub fn run(&mut self) -> ControlFlow<()> {
        if self.host.n < self.k {
            return ControlFlow::Continue(());
        }
        self.place(0)
    }

    /// Current leaf budget.
    #[inline]
    fn cap(&self) -> usize {
        self.budget.min(self.visitor.leaf_cap())
    }

    #[inline]
    fn is_a(&self, h: usize) -> bool {
        h < self.t
    }

    #[inline]
    fn pair(&self, a: usize, b: usize) -> usize {
        a * 3 + (b - self.t)
    }

    fn add(&mut self, x: usize, h: usize) {
        self.owner[x] = h;
        self.members[h].push(x);
        self.used.insert(x);
        let h_is_a = self.is_a(h);
        for &y in &self.host.adj[x] {
            let o = self.owner[y];
            if o != NONE && self.is_a(o) != h_is_a {
                let p = if h_is_a { self.pair(h, o) } else { self.pair(o, h) };
                self.cnt[p] += 1;
            }
        }
    }

    fn remove(&mut self, x: usize) {
        let h = self.owner[x];
        let h_is_a = self.is_a(h);
        for &y in &self.host.adj[x] {
            let o = self.owner[y];
            if o != NONE && self.is_a(o) != h_is_a {
                let p = if h_is_a { self.pair(h, o) } else { self.pair(o, h) };
                self.cnt[p] -= 1;
            }
        }
        self.members[h].pop();
        self.used.remove(x);
        self.owner[x] = NONE;
    }

    /// Leaves pair `(a, b)` still needs: none once the stars touch, else the
    /// distance between the stars minus one.
    fn pair_need(&self, a: usize, b: usize) -> usize {
        if self.center[a] == NONE || self.center[b] == NONE || self.cnt[self.pair(a, b)] > 0 {
            return 0;
        }
        let mut d = FAR;
        for &x in &self.members[a] {
            for &y in &self.members[b] {
                d = d.min(self.host.dist[x][y]);
            }
        }
        // Opposite centers are within distance 3, so `d` is at most 3.
        usize::from(d.min(3)) - 1
    }

    /// Lower bound on the leaves still needed: a matching of unsatisfied
    /// pairs. Pairs sharing no target vertex need disjoint leaves.
    fn pair_bound(&self) -> usize {
        let mut need = [[0usize; 3]; 64];
        for (a, row) in need.iter_mut().enumerate().take(self.t) {
            for (j, w) in row.iter_mut().enumerate() {
                *w = self.pair_need(a, self.t + j);
            }
        }
        if self.t == 3 {
            const PERMS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            return PERMS
                .iter()
                .map(|p| (0..3).map(|a| need[a][p[a]]).sum())
                .max()
                .unwrap_or(0);
        }
        let mut pairs: Vec<(usize, usize, usize)> = (0..self.t)
            .flat_map(|a| (0..3).map(move |j| (a, j)))
            .map(|(a, j)| (need[a][j], a, j))
            .filter(|p| p.0 > 0)
            .collect();
        pairs.sort_unstable_by_key(|p| std::cmp::Reverse(p.0));
        let mut used_a = 0u64;
        let mut used_b = 0u8;
        let mut m = 0;
        for (w, a, j) in pairs {
            if used_a >> a & 1 == 0 && used_b >> j & 1 == 0 {
                used_a |= 1 << a;
                used_b |= 1 << j;
                m += w;
            }
        }
        m
    }

    fn star_bound(&self) -> usize {
        let mut s = 0;
        for h in 0..self.k {
            let c = self.center[h];
            if c != NONE {
                s += if self.is_a(h) { self.min_a[c] } else { self.min_b[c] };
            }
        }
        s
    }

    fn place(&mut self, step: usize) -> ControlFlow<()> {
        if step == self.k {
            return self.solve();
        }
        let h = self.order[step];
        let side_a = self.is_a(h);
        let first_of_side = if side_a { 0 } else { self.t };
        let mut lo = if h > first_of_side { self.center[h - 1] + 1 } else { 0 };
        if self.t == 3 && h == 0 {
            // K_{3,3}: the sides are interchangeable too.
            lo = lo.max(self.center[3] + 1);
        }
        // Remaining same-side centers must fit above this one.
        let later_same_side = if side_a { self.t - 1 - h } else { self.t + 2 - h };
        for x in lo..self.host.n.saturating_sub(later_same_side) {
            if self.owner[x] != NONE {
                continue;
            }
            let need = if side_a { self.min_a[x] } else { self.min_b[x] };
            if need == IMPOSSIBLE {
                continue;
            }
            let reachable = (0..self.k).filter(|&o| self.is_a(o) != side_a).all(|o| {
                let c = self.center[o];
                c == NONE || self.host.dist[x][c] <= 3
            });
            if !reachable {
                continue;
            }
            self.center[h] = x;
            self.add(x, h);
            if self.pair_bound().max(self.star_bound()) <= self.cap() {
                self.place(step + 1)?;
            }
            self.remove(x);
            self.center[h] = NONE;
        }
        ControlFlow::Continue(())
    }

    fn free_for(&self, x: usize, h: usize) -> bool {
        self.owner[x] == NONE && self.forbid[x] >> h & 1 == 0
    }

    fn touches(&self, x: usize, h: usize) -> bool {
        self.host.adj[x].iter().any(|&y| self.owner[y] == h)
    }

    /// Ways to satisfy pair `(a, b)`: single leaves for `a`, single leaves
    /// for `b`, and adjacent leaf pairs.
    #[allow(clippy::type_complexity)]
    fn options(&self, a: usize, b: usize, limit: usize) -> (Vec<(usize, usize)>, Vec<(usize, usize)>) {
        let (ca, cb) = (self.center[a], self.center[b]);
        let mut single = Vec::new();
        for &x in &self.host.adj[ca] {
            if self.free_for(x, a) && self.touches(x, b) {
                single.push((x, a));
            }
        }
        for &y in &self.host.adj[cb] {
            if self.free_for(y, b) && self.touches(y, a) {
                single.push((y, b));
            }
        }
        let mut double = Vec::new();
        if self.cap().saturating_sub(self.leaves) >= 2 {
            for &x in &self.host.adj[ca] {
                if !self.free_for(x, a) || self.touches(x, b) {
                    continue;
                }
                for &y in &self.host.adj[x] {
                    if y != x && self.host.adjacent(y, cb) && self.free_for(y, b) && !self.touches(y, a) {
                        double.push((x, y));
                        if single.len() + double.len() > limit {
                            return (single, double);
                        }
                    }
                }
            }
        }
        (single, double)
    }

    fn solve(&mut self) -> ControlFlow<()> {
        self.nodes += 1;
        if self.leaves > self.cap() || self.pair_bound() > self.cap() - self.leaves {
            return ControlFlow::Continue(());
        }
        if self.visitor.prune(&State {
            center: &self.center,
            members: &self.members,
            used: &self.used,
        }) {
            return ControlFlow::Continue(());
        }
        let mut best: Option<(usize, usize, usize)> = None;
        for a in 0..self.t {
            for j in 0..3 {
                let b = self.t + j;
                if self.cnt[self.pair(a, b)] > 0 {
                    continue;
                }
                let limit = best.map_or(usize::MAX, |(n, _, _)| n);
                let (s, d) = self.options(a, b, limit);
                let n = s.len() + d.len();
                if best.is_none_or(|(bn, _, _)| n < bn) {
                    best = Some((n, a, b));
                    if n == 0 {
                        return ControlFlow::Continue(());
                    }
                }
            }
        }
        let Some((_, a, b)) = best else {
            return self.visitor.visit(&State {
                center: &self.center,
                members: &self.members,
                used: &self.used,
            });
        };
        if self.leaves >= self.cap() {
            return ControlFlow::Continue(());
        }
        let (single, double) = self.options(a, b, usize::MAX);
        let mut forbidden = Vec::new();
        let mut flow = ControlFlow::Continue(());
        for &(x, h) in &single {
            if !self.free_for(x, h) {
                continue;
            }
            self.leaves += 1;
            self.add(x, h);
            flow = self.solve();
            self.remove(x);
            self.leaves -= 1;
            if flow.is_break() {
                break;
            }
            self.forbid[x] |= 1 << h;
            forbidden.push((x, h));
        }
        if flow.is_continue() {
            for &(x, y) in &double {
                if !self.free_for(x, a) || !self.free_for(y, b) {
                    continue;
                }
                self.leaves += 2;
                self.add(x, a);
                self.add(y, b);
                flow = self.solve();
                self.remove(y);
                self.remove(x);
                self.leaves -= 2;
                if flow.is_break() {
                    break;
                }
            }
        }
        for (x, h) in forbidden {
            self.forbid[x] &= !(1 << h);
        }
        flow
    }
}

/// Stops at the first model and records its stars.
#[derive(Default)]
pub(crate) struct FirstModel {
    pub found: Option<(Vec<usize>, Vec<Vec<usize>>)>,
}

impl Visitor for FirstModel {
    fn visit(&mut self, s: &State<'_>) -> ControlFlow<()> {
        self.found = Some((s.center.to_vec(), s.members.to_vec()));
        ControlFlow::Break(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k33() -> Graph {
        let mut e = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                e.push((a, b));
            }
        }
        Graph::from_edges(6, &e).unwrap()
    }

    #[test]
    fn finds_k33_with_no_leaves() {
        let h = Host::new(&k33());
        let mut s = Search::new(&h, 3, 0, FirstModel::default());
        assert!(s.run().is_break());
        let (_, members) = s.visitor.found.unwrap();
        assert!(members.iter().all(|m| m.len() == 1));
    }

    #[test]
    fn single_subdivision_needs_one_leaf() {
        // K_{3,3} with edge 1-4 subdivided by vertex 7
        let mut e: Vec<(u64, u64)> = Vec::new();
        for a in 1..=3 {
            for b in 4..=6 {
                if (a, b) != (1, 4) {
                    e.push((a, b));
                }
            }
        }
        e.push((1, 7));
        e.push((7, 4));
        let g = Graph::from_edges(7, &e).unwrap();
        let h = Host::new(&g);
        assert!(Search::new(&h, 3, 0, FirstModel::default()).run().is_continue());
        assert!(Search::new(&h, 3, 1, FirstModel::default()).run().is_break());
    }

    #[test]
    fn min_leaves_bound() {
        let h = Host::new(&k33());
        assert_eq!(h.min_leaves(0, 3), 0);
        assert_eq!(h.min_leaves(0, 5), 2);
        assert_eq!(h.min_leaves(0, 8), IMPOSSIBLE);
    }
}
