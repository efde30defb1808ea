//! Planarity and biconnected blocks, via `rustworkx-core`.

use hashbrown::HashMap;
use rustworkx_core::connectivity::articulation_points;
use rustworkx_core::petgraph::graph::{NodeIndex, UnGraph};
use rustworkx_core::planar::is_planar as lr_is_planar;

use crate::graph::Graph;

fn to_petgraph(g: &Graph) -> UnGraph<(), ()> {
    let mut pg = UnGraph::with_capacity(g.num_vertices(), g.num_edges());
    for _ in 0..g.num_vertices() {
        pg.add_node(());
    }
    for i in 0..g.num_vertices() {
        for &j in g.neighbor_indices(i) {
            if j > i {
                pg.add_edge(NodeIndex::new(i), NodeIndex::new(j), ());
            }
        }
    }
    pg
}

pub fn is_planar(g: &Graph) -> bool {
    // Every nonplanar graph contains a subdivided K5 or K3,3.
    if g.num_vertices() < 5 || g.num_edges() < 9 {
        return true;
    }
    if g.num_edges() > 3 * g.num_vertices() - 6 {
        return false;
    }
    lr_is_planar(&to_petgraph(g))
}

/// Biconnected blocks with at least one edge, as sorted vertex-index lists.
/// Bridges are returned as two-vertex blocks. Isolated vertices belong to no
/// block.
pub fn blocks(g: &Graph) -> Vec<Vec<usize>> {
    let pg = to_petgraph(g);
    let mut comp: HashMap<(NodeIndex, NodeIndex), usize> = HashMap::new();
    articulation_points(&pg, Some(&mut comp));
    let ncomp = comp.values().copied().max().map_or(0, |m| m + 1);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); ncomp];
    for (&(a, b), &c) in &comp {
        members[c].push(a.index());
        members[c].push(b.index());
    }
    for m in &mut members {
        m.sort_unstable();
        m.dedup();
    }
    members.sort();
    members
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
    fn planarity() {
        assert!(!is_planar(&k33()));
        let mut k5 = Vec::new();
        for a in 1..=5 {
            for b in a + 1..=5 {
                k5.push((a, b));
            }
        }
        assert!(!is_planar(&Graph::from_edges(5, &k5).unwrap()));
        let mut grid = Vec::new();
        for r in 0..4u64 {
            for c in 0..4u64 {
                let v = r * 4 + c + 1;
                if c < 3 {
                    grid.push((v, v + 1));
                }
                if r < 3 {
                    grid.push((v, v + 4));
                }
            }
        }
        assert!(is_planar(&Graph::from_edges(16, &grid).unwrap()));
    }

    #[test]
    fn blocks_of_two_triangles_and_a_bridge() {
        // triangles 1-2-3 and 4-5-6 joined by bridge 3-4, plus isolated 7
        let g = Graph::from_edges(
            7,
            &[(1, 2), (2, 3), (1, 3), (3, 4), (4, 5), (5, 6), (4, 6)],
        )
        .unwrap();
        assert_eq!(blocks(&g), vec![vec![0, 1, 2], vec![2, 3], vec![3, 4, 5]]);
    }
}
