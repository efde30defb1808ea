//! Seeded graph families with certified genus upper bounds.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Graph, GraphError, VertexId};
use crate::minor::genus::{complete_graph_genus, euler_edge_bound};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("generated graph violates the edge bound for genus {genus}: {edges} > {bound}")]
    EdgeBound { genus: u64, edges: u64, bound: u64 },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum Family {
    Grid { rows: u64, cols: u64 },
    Cycle { n: u64 },
    RandomPlanarTriangulation { n: u64 },
    ToroidalGrid { rows: u64, cols: u64 },
    PlanarPlusK33Handles { n: u64, h: u64 },
    SubdividedK33 { subdiv: u64 },
    Star { leaves: u64 },
    Complete { n: u64 },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Grid { .. } => "grid",
            Family::Cycle { .. } => "cycle",
            Family::RandomPlanarTriangulation { .. } => "random_planar_triangulation",
            Family::ToroidalGrid { .. } => "toroidal_grid",
            Family::PlanarPlusK33Handles { .. } => "planar_plus_k33_handles",
            Family::SubdividedK33 { .. } => "subdivided_k33",
            Family::Star { .. } => "star",
            Family::Complete { .. } => "complete",
        }
    }

    /// Parameters as a compact `key=value` list.
    pub fn params(&self) -> String {
        match self {
            Family::Grid { rows, cols } | Family::ToroidalGrid { rows, cols } => {
                format!("rows={rows};cols={cols}")
            }
            Family::Cycle { n } | Family::RandomPlanarTriangulation { n } | Family::Complete { n } => {
                format!("n={n}")
            }
            Family::PlanarPlusK33Handles { n, h } => format!("n={n};h={h}"),
            Family::SubdividedK33 { subdiv } => format!("subdiv={subdiv}"),
            Family::Star { leaves } => format!("leaves={leaves}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GenSpec {
    #[serde(flatten)]
    pub family: Family,
    #[serde(default)]
    pub seed: u64,
    /// Seed of a random ID permutation applied after construction.
    #[serde(default)]
    pub shuffle_ids: Option<u64>,
}

impl GenSpec {
    pub fn new(family: Family, seed: u64) -> Self {
        GenSpec {
            family,
            seed,
            shuffle_ids: None,
        }
    }

    pub fn shuffled(mut self, seed: u64) -> Self {
        self.shuffle_ids = Some(seed);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Generated {
    pub graph: Graph,
    pub certified_genus: u64,
}

/// Edge list under construction; vertices are `1..=n` in creation order.
#[derive(Default)]
struct Builder {
    n: u64,
    edges: Vec<(u64, u64)>,
}

impl Builder {
    fn vertex(&mut self) -> u64 {
        self.n += 1;
        self.n
    }

    fn edge(&mut self, u: u64, v: u64) {
        self.edges.push((u.min(v), u.max(v)));
    }

    fn finish(self) -> Result<Graph, GraphError> {
        Graph::from_edges(self.n, &self.edges)
    }
}

fn invalid(msg: impl Into<String>) -> GenError {
    GenError::InvalidParams(msg.into())
}

fn grid(b: &mut Builder, rows: u64, cols: u64, wrap: bool) {
    let base = b.n;
    for _ in 0..rows * cols {
        b.vertex();
    }
    let id = |i: u64, j: u64| base + (i % rows) * cols + (j % cols) + 1;
    for i in 0..rows {
        for j in 0..cols {
            if wrap || j + 1 < cols {
                b.edge(id(i, j), id(i, j + 1));
            }
            if wrap || i + 1 < rows {
                b.edge(id(i, j), id(i + 1, j));
            }
        }
    }
}

/// Triangulation grown by repeatedly placing a vertex in a uniformly random
/// face and joining it to the three corners.
fn triangulation(b: &mut Builder, n: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let (x, y, z) = (b.vertex(), b.vertex(), b.vertex());
    b.edge(x, y);
    b.edge(y, z);
    b.edge(x, z);
    // Both sides of the initial triangle are faces.
    let mut faces = vec![[x, y, z], [x, y, z]];
    let mut verts = vec![x, y, z];
    for _ in 3..n {
        let f = rng.random_range(0..faces.len());
        let [a, c, d] = faces[f];
        let w = b.vertex();
        b.edge(a, w);
        b.edge(c, w);
        b.edge(d, w);
        faces[f] = [a, c, w];
        faces.push([c, d, w]);
        faces.push([a, d, w]);
        verts.push(w);
    }
    verts
}

/// `K_{3,3}` with `subdivided` of its edges split once, attaching branch
/// vertex `a0` to an existing vertex when `attach` is given.
fn k33_gadget(b: &mut Builder, subdivided: &[bool; 9], attach: Option<u64>) {
    let a0 = attach.unwrap_or_else(|| b.vertex());
    let a = [a0, b.vertex(), b.vertex()];
    let bs = [b.vertex(), b.vertex(), b.vertex()];
    for (k, (i, j)) in (0..3).flat_map(|i| (0..3).map(move |j| (i, j))).enumerate() {
        if subdivided[k] {
            let s = b.vertex();
            b.edge(a[i], s);
            b.edge(s, bs[j]);
        } else {
            b.edge(a[i], bs[j]);
        }
    }
}

fn build(family: &Family, rng: &mut ChaCha8Rng) -> Result<Generated, GenError> {
    let mut b = Builder::default();
    let genus = match *family {
        Family::Grid { rows, cols } => {
            if rows == 0 || cols == 0 {
                return Err(invalid("grid dimensions must be positive"));
            }
            grid(&mut b, rows, cols, false);
            0
        }
        Family::ToroidalGrid { rows, cols } => {
            if rows < 3 || cols < 3 {
                return Err(invalid("toroidal grid needs at least 3 rows and 3 columns"));
            }
            grid(&mut b, rows, cols, true);
            1
        }
        Family::Cycle { n } => {
            if n < 3 {
                return Err(invalid("cycle needs at least 3 vertices"));
            }
            for _ in 0..n {
                b.vertex();
            }
            for i in 1..=n {
                b.edge(i, i % n + 1);
            }
            0
        }
        Family::RandomPlanarTriangulation { n } => {
            if n < 3 {
                return Err(invalid("triangulation needs at least 3 vertices"));
            }
            triangulation(&mut b, n, rng);
            0
        }
        Family::PlanarPlusK33Handles { n, h } => {
            if n < 4 {
                return Err(invalid("base triangulation needs at least 4 vertices"));
            }
            if h > n {
                return Err(invalid(format!("{n} vertices cannot host {h} distinct attachment sites")));
            }
            let mut sites = triangulation(&mut b, n, rng);
            sites.shuffle(rng);
            for &site in sites.iter().take(h as usize) {
                let count = rng.random_range(0..=6);
                let mut sub = [false; 9];
                sub[..count].iter_mut().for_each(|s| *s = true);
                sub.shuffle(rng);
                k33_gadget(&mut b, &sub, Some(site));
            }
            h
        }
        Family::SubdividedK33 { subdiv } => {
            let a: Vec<u64> = (0..3).map(|_| b.vertex()).collect();
            let bs: Vec<u64> = (0..3).map(|_| b.vertex()).collect();
            for &x in &a {
                for &y in &bs {
                    let mut prev = x;
                    for _ in 0..subdiv {
                        let s = b.vertex();
                        b.edge(prev, s);
                        prev = s;
                    }
                    b.edge(prev, y);
                }
            }
            1
        }
        Family::Star { leaves } => {
            let c = b.vertex();
            for _ in 0..leaves {
                let l = b.vertex();
                b.edge(c, l);
            }
            0
        }
        Family::Complete { n } => {
            if n == 0 {
                return Err(invalid("complete graph needs a vertex"));
            }
            for _ in 0..n {
                b.vertex();
            }
            for u in 1..=n {
                for v in u + 1..=n {
                    b.edge(u, v);
                }
            }
            complete_graph_genus(n)
        }
    };
    Ok(Generated {
        graph: b.finish()?,
        certified_genus: genus,
    })
}

/// Applies a seeded random permutation of the IDs `1..=n`.
pub fn shuffle_ids(g: &Graph, seed: u64) -> Result<Graph, GraphError> {
    let mut perm: Vec<u64> = (1..=g.num_vertices() as u64).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let pos: std::collections::BTreeMap<VertexId, u64> = g
        .vertices()
        .iter()
        .zip(perm)
        .map(|(&v, p)| (v, p))
        .collect();
    g.relabel(|v| VertexId(pos[&v]))
}

/// Builds the graph of `spec`. Identical specs give identical graphs.
pub fn generate(spec: &GenSpec) -> Result<Generated, GenError> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut out = build(&spec.family, &mut rng)?;
    if let Some(s) = spec.shuffle_ids {
        out.graph = shuffle_ids(&out.graph, s)?;
    }
    let n = out.graph.num_vertices() as u64;
    if n >= 3 {
        let bound = euler_edge_bound(n, out.certified_genus).expect("n >= 3");
        let edges = out.graph.num_edges() as u64;
        if edges > bound {
            return Err(GenError::EdgeBound {
                genus: out.certified_genus,
                edges,
                bound,
            });
        }
    }
    Ok(out)
}

/// Random planar triangulation with `h` attached `K_{3,3}` gadgets.
pub fn planar_plus_handles(n: u64, h: u64, seed: u64) -> Result<Generated, GenError> {
    generate(&GenSpec::new(Family::PlanarPlusK33Handles { n, h }, seed))
}
