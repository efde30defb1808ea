//! Shared inputs for the benchmarks.

use locdom_core::{generate, Family, GenSpec, Graph};

/// A named benchmark input with its genus.
pub struct Fixture {
    pub name: String,
    pub graph: Graph,
    pub genus: u64,
}

fn fixture(family: Family, seed: u64) -> Fixture {
    let spec = GenSpec::new(family, seed);
    let gen = generate(&spec).expect("fixture parameters are valid");
    Fixture {
        name: format!("{}/{}", spec.family.name(), spec.family.params()),
        graph: gen.graph,
        genus: gen.certified_genus,
    }
}

/// Planar and bounded-genus inputs for the end-to-end solver.
pub fn solver_inputs() -> Vec<Fixture> {
    vec![
        fixture(Family::Grid { rows: 10, cols: 10 }, 0),
        fixture(Family::RandomPlanarTriangulation { n: 100 }, 1),
        fixture(Family::ToroidalGrid { rows: 6, cols: 6 }, 0),
        fixture(Family::PlanarPlusK33Handles { n: 30, h: 2 }, 7),
    ]
}

/// Inputs small enough for exact search.
pub fn oracle_inputs() -> Vec<Fixture> {
    vec![
        fixture(Family::Grid { rows: 5, cols: 5 }, 0),
        fixture(Family::RandomPlanarTriangulation { n: 24 }, 3),
        fixture(Family::Cycle { n: 30 }, 0),
    ]
}

/// Inputs for minor detection, with and without a `K_{3,3}` model.
pub fn minor_inputs() -> Vec<Fixture> {
    vec![
        fixture(Family::SubdividedK33 { subdiv: 0 }, 0),
        fixture(Family::PlanarPlusK33Handles { n: 20, h: 1 }, 2),
        fixture(Family::Grid { rows: 6, cols: 6 }, 0),
    ]
}
