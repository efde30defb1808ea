//! The LOCAL pipeline against a sequential reference that sees the whole graph.

use std::collections::{BTreeMap, BTreeSet};

use locdom_core::mds::phase2::choose_dominator;
use locdom_core::mds::k33::{find_canonical_k33_cached, KvCache};
use locdom_core::mds::{preprocess, Config, KvRefresh, Phase2Rule};
use locdom_core::oracle::exact_coverage;
use locdom_core::{generate, solve, Family, GenSpec, Graph, VertexId};

fn meets(a: &[VertexId], b: &[VertexId]) -> bool {
    a.iter().any(|x| b.binary_search(x).is_ok())
}

/// One sweep of the conflict rule over every undecided witness.
fn resolve_step(
    rest: &Graph,
    kv: &BTreeMap<VertexId, Vec<VertexId>>,
    status: &BTreeMap<VertexId, u8>,
) -> BTreeMap<VertexId, u8> {
    const UNDECIDED: u8 = 1;
    const CHOSEN: u8 = 2;
    const DEAD: u8 = 3;
    let mut next = status.clone();
    for (&v, &s) in status {
        if s != UNDECIDED {
            continue;
        }
        let dist = rest.distances_from(rest.index_of(v).unwrap(), 12);
        let near: Vec<VertexId> = (0..rest.num_vertices())
            .filter(|&i| dist[i].is_some())
            .map(|i| rest.id_at(i))
            .filter(|&u| u != v && kv.contains_key(&u) && meets(&kv[&u], &kv[&v]))
            .collect();
        let chosen_here: Vec<&Vec<VertexId>> = (0..rest.num_vertices())
            .filter(|&i| dist[i].is_some())
            .map(|i| rest.id_at(i))
            .filter(|u| status.get(u) == Some(&CHOSEN))
            .map(|u| &kv[&u])
            .collect();
        next.insert(
            v,
            if near.iter().any(|u| status[u] == CHOSEN) {
                DEAD
            } else if near.iter().any(|&u| {
                u < v && status[&u] == UNDECIDED && !chosen_here.iter().any(|k| meets(k, &kv[&u]))
            }) {
                UNDECIDED
            } else {
                CHOSEN
            },
        );
    }
    next
}

fn reference_preprocess(g: &Graph, d: &BTreeSet<VertexId>, genus: u64, refresh: KvRefresh) -> BTreeSet<VertexId> {
    let mut d = d.clone();
    let iterations = if refresh == KvRefresh::Once { 1 } else { genus };
    let steps = if refresh == KvRefresh::Once { genus } else { 1 };
    for _ in 0..iterations {
        let rest = g.without_vertices(&d.iter().copied().collect::<Vec<_>>());
        let cache = KvCache::new();
        let kv: BTreeMap<VertexId, Vec<VertexId>> = rest
            .vertices()
            .iter()
            .filter_map(|&v| find_canonical_k33_cached(&rest, v, &cache).unwrap().map(|k| (v, k.vertices)))
            .collect();
        let mut status: BTreeMap<VertexId, u8> = kv.keys().map(|&v| (v, 1)).collect();
        for _ in 0..steps {
            status = resolve_step(&rest, &kv, &status);
        }
        for (v, s) in &status {
            if *s == 2 {
                d.extend(kv[v].iter().copied());
            }
        }
    }
    d
}

fn reference(g: &Graph, cfg: &Config) -> (Vec<VertexId>, Vec<VertexId>, BTreeMap<VertexId, VertexId>) {
    let k = 2 * cfg.c as usize;
    let phase1: BTreeSet<VertexId> = g
        .vertices()
        .iter()
        .copied()
        .filter(|&v| !exact_coverage(g, v, k).unwrap())
        .collect();
    let d = if cfg.g > 0 {
        reference_preprocess(g, &phase1, cfg.g, cfg.kv_refresh)
    } else {
        phase1.clone()
    };
    let dom: BTreeMap<VertexId, VertexId> = g
        .vertices()
        .iter()
        .filter_map(|&v| {
            choose_dominator(g, v, |w| d.contains(&w), cfg.phase2_rule, cfg.threshold()).map(|w| (v, w))
        })
        .collect();
    let pre = d.difference(&phase1).copied().collect();
    (phase1.into_iter().collect(), pre, dom)
}

fn corpus() -> Vec<(Graph, u64)> {
    let mut out = Vec::new();
    let families = [
        Family::Grid { rows: 5, cols: 7 },
        Family::Cycle { n: 13 },
        Family::Star { leaves: 9 },
        Family::RandomPlanarTriangulation { n: 25 },
        Family::ToroidalGrid { rows: 3, cols: 4 },
        Family::PlanarPlusK33Handles { n: 16, h: 1 },
        Family::PlanarPlusK33Handles { n: 20, h: 2 },
        Family::SubdividedK33 { subdiv: 2 },
    ];
    for f in families {
        for seed in 0..2 {
            let gen = generate(&GenSpec::new(f.clone(), seed).shuffled(seed + 40)).unwrap();
            out.push((gen.graph, gen.certified_genus));
        }
    }
    out
}

#[test]
fn pipeline_matches_reference() {
    for (g, genus) in corpus() {
        for rule in [Phase2Rule::MaxResidual, Phase2Rule::FirstOrderThreshold] {
            for refresh in [KvRefresh::Once, KvRefresh::EveryIteration] {
                let mut cfg = Config::for_genus(genus).with_rule(rule);
                cfg.kv_refresh = refresh;
                let r = solve(&g, &cfg).unwrap();
                let (p1, pre, dom) = reference(&g, &cfg);
                assert_eq!(r.d_phase1, p1, "phase 1, n={}", g.num_vertices());
                assert_eq!(r.d_preprocess, pre, "preprocessing, n={}", g.num_vertices());
                assert_eq!(r.dom_map, dom, "phase 2, n={}", g.num_vertices());
                assert_eq!(r.rounds(), cfg.expected_rounds());
            }
        }
    }
}

#[test]
fn preprocess_alone_matches_solve() {
    for (g, genus) in corpus().into_iter().filter(|(_, genus)| *genus > 0) {
        let cfg = Config::for_genus(genus);
        let r = solve(&g, &cfg).unwrap();
        let (added, traces) = locdom_core::mds::preprocess(&g, &r.d_phase1, &cfg).unwrap();
        assert_eq!(added, r.d_preprocess);
        assert_eq!(traces.iter().map(|t| t.rounds_used).sum::<usize>(), r.rounds_of("detect") + r.rounds_of("resolve") + r.rounds_of("absorb"));
        let mut d = r.d_phase1.clone();
        d.extend(&added);
        assert!(preprocess::residual_witnesses(&g, &d).unwrap().is_empty());
    }
}
