//! Preprocessing: remove disjoint `K_{3,3}` witnesses by adding them to `D`.
//!
//! Programs, in pipeline order:
//!
//! * `detect` (radius 6) computes `K_v` in `G - D`.
//! * `resolve` (radius 12) settles conflicts between intersecting witnesses.
//!   A witness dies once it meets a chosen one. It is chosen once no
//!   smaller conflicting witness within 12 hops is still alive, where a
//!   witness that meets a chosen one visible in the same ball already
//!   counts as dead. The first step is exactly "no smaller vertex within 12
//!   hops has an intersecting witness".
//! * `absorb` (radius 6) adds the vertices of chosen witnesses to `D`.
//!
//! With [`KvRefresh::Once`] the pipeline is detect, `g` resolve steps, and
//! one absorb. With [`KvRefresh::EveryIteration`] each of the `g`
//! iterations runs detect, a single resolve step and absorb, so witnesses
//! are recomputed against the grown `D`.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::k33::{find_canonical_k33_cached, KvCache};
use crate::graph::{Graph, VertexId};
use crate::runtime::{LocalView, NodeProgram, RuntimeError, Value};

/// When canonical witnesses are computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
pub enum KvRefresh {
    /// Once, before the conflict-resolution loop (`12g + 17` rounds total).
    #[default]
    Once,
    /// At the start of every iteration (`24g + 5` rounds total).
    EveryIteration,
}

/// Status codes stored by resolve steps.
pub mod status {
    pub const NO_WITNESS: u64 = 0;
    pub const UNDECIDED: u64 = 1;
    pub const CHOSEN: u64 = 2;
    pub const DEAD: u64 = 3;
}

fn d_members(view: &LocalView<'_>, d_field: &str) -> Result<Vec<VertexId>, RuntimeError> {
    let mut d = Vec::new();
    for &u in view.graph().vertices() {
        if view.flag(u, d_field)? {
            d.push(u);
        }
    }
    Ok(d)
}

pub struct DetectProgram {
    pub d_field: String,
    pub out: String,
    /// Block searches shared between vertices; never changes a result.
    pub cache: KvCache,
}

impl NodeProgram for DetectProgram {
    fn name(&self) -> String {
        "detect".into()
    }
    fn radius(&self) -> usize {
        6
    }
    fn consumes(&self) -> Vec<String> {
        vec![self.d_field.clone()]
    }
    fn produces(&self) -> String {
        self.out.clone()
    }
    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError> {
        let v = view.center();
        if view.flag(v, &self.d_field)? {
            return Ok(Value::Set(Vec::new()));
        }
        let rest = view.graph().without_vertices(&d_members(view, &self.d_field)?);
        let kv = find_canonical_k33_cached(&rest, v, &self.cache)?;
        Ok(Value::Set(kv.map(|k| k.vertices).unwrap_or_default()))
    }
}

pub struct ResolveStep {
    pub step: usize,
    pub d_field: String,
    pub kv_field: String,
    /// Status field of the previous step; `None` for the first step.
    pub prev: Option<String>,
    pub out: String,
}

impl ResolveStep {
    fn status_of(&self, view: &LocalView<'_>, u: VertexId) -> Result<u64, RuntimeError> {
        match &self.prev {
            Some(f) => view
                .annotation(u, f)?
                .as_count()
                .ok_or_else(|| RuntimeError::AnnotationType {
                    vertex: u,
                    field: f.clone(),
                }),
            None => Ok(if view.set(u, &self.kv_field)?.is_empty() {
                status::NO_WITNESS
            } else {
                status::UNDECIDED
            }),
        }
    }
}

impl NodeProgram for ResolveStep {
    fn name(&self) -> String {
        format!("resolve-{}", self.step)
    }
    fn radius(&self) -> usize {
        12
    }
    fn consumes(&self) -> Vec<String> {
        let mut c = vec![self.d_field.clone(), self.kv_field.clone()];
        c.extend(self.prev.clone());
        c
    }
    fn produces(&self) -> String {
        self.out.clone()
    }
    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError> {
        let v = view.center();
        let mine = self.status_of(view, v)?;
        if mine != status::UNDECIDED {
            return Ok(Value::Count(mine));
        }
        let kv: BTreeSet<VertexId> = view.set(v, &self.kv_field)?.iter().copied().collect();
        // Witnesses live in G - D, so conflicts are searched there.
        let rest = view.graph().without_vertices(&d_members(view, &self.d_field)?);
        let vi = rest.index_of(v).expect("v is outside D");
        let dist = rest.distances_from(vi, 12);
        let mut chosen: Vec<&[VertexId]> = Vec::new();
        for &w in rest.vertices() {
            if self.status_of(view, w)? == status::CHOSEN {
                chosen.push(view.set(w, &self.kv_field)?);
            }
        }
        let meets = |a: &[VertexId], b: &[VertexId]| a.iter().any(|x| b.binary_search(x).is_ok());
        let mut blocked = false;
        for (i, d) in dist.iter().enumerate() {
            let u = rest.id_at(i);
            if d.is_none() || u == v {
                continue;
            }
            let ku = view.set(u, &self.kv_field)?;
            if !ku.iter().any(|x| kv.contains(x)) {
                continue;
            }
            let su = self.status_of(view, u)?;
            if su == status::CHOSEN {
                return Ok(Value::Count(status::DEAD));
            }
            // An undecided u that meets a chosen witness visible here dies
            // in this step, so it no longer blocks v.
            let doomed = su == status::UNDECIDED && chosen.iter().any(|kw| meets(kw, ku));
            if u < v && su == status::UNDECIDED && !doomed {
                blocked = true;
            }
        }
        Ok(Value::Count(if blocked {
            status::UNDECIDED
        } else {
            status::CHOSEN
        }))
    }
}

pub struct AbsorbProgram {
    pub d_field: String,
    pub kv_field: String,
    pub status_field: String,
    pub out: String,
}

impl NodeProgram for AbsorbProgram {
    fn name(&self) -> String {
        "absorb".into()
    }
    fn radius(&self) -> usize {
        6
    }
    fn consumes(&self) -> Vec<String> {
        vec![
            self.d_field.clone(),
            self.kv_field.clone(),
            self.status_field.clone(),
        ]
    }
    fn produces(&self) -> String {
        self.out.clone()
    }
    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError> {
        let v = view.center();
        if view.flag(v, &self.d_field)? {
            return Ok(Value::Flag(true));
        }
        for &u in view.graph().vertices() {
            let chosen = view.annotation(u, &self.status_field)?.as_count() == Some(status::CHOSEN);
            if chosen && view.set(u, &self.kv_field)?.contains(&v) {
                return Ok(Value::Flag(true));
            }
        }
        Ok(Value::Flag(false))
    }
}

/// The preprocessing programs for `genus` iterations, reading membership in
/// `D` from `d_field`. Returns the programs and the field holding the final
/// membership.
pub fn programs(genus: u64, refresh: KvRefresh, d_field: &str) -> (Vec<Box<dyn NodeProgram>>, String) {
    let mut out: Vec<Box<dyn NodeProgram>> = Vec::new();
    if genus == 0 {
        return (out, d_field.to_string());
    }
    match refresh {
        KvRefresh::Once => {
            out.push(Box::new(DetectProgram {
                d_field: d_field.into(),
                out: "kv".into(),
                cache: KvCache::new(),
            }));
            let mut prev: Option<String> = None;
            for step in 1..=genus as usize {
                let field = format!("status_{step}");
                out.push(Box::new(ResolveStep {
                    step,
                    d_field: d_field.into(),
                    kv_field: "kv".into(),
                    prev: prev.clone(),
                    out: field.clone(),
                }));
                prev = Some(field);
            }
            out.push(Box::new(AbsorbProgram {
                d_field: d_field.into(),
                kv_field: "kv".into(),
                status_field: prev.unwrap(),
                out: "in_d_pre".into(),
            }));
            (out, "in_d_pre".into())
        }
        KvRefresh::EveryIteration => {
            let mut d = d_field.to_string();
            for it in 1..=genus as usize {
                let kv = format!("kv_{it}");
                let st = format!("status_{it}");
                let next = format!("in_d_{it}");
                out.push(Box::new(DetectProgram {
                    d_field: d.clone(),
                    out: kv.clone(),
                    cache: KvCache::new(),
                }));
                out.push(Box::new(ResolveStep {
                    step: it,
                    d_field: d.clone(),
                    kv_field: kv.clone(),
                    prev: None,
                    out: st.clone(),
                }));
                out.push(Box::new(AbsorbProgram {
                    d_field: d.clone(),
                    kv_field: kv,
                    status_field: st,
                    out: next.clone(),
                }));
                d = next;
            }
            (out, d)
        }
    }
}

/// Every vertex outside `d` whose canonical witness in `G - d` is nonempty.
pub fn residual_witnesses(g: &Graph, d: &[VertexId]) -> Result<BTreeMap<VertexId, Vec<VertexId>>, RuntimeError> {
    use rayon::prelude::*;
    let rest = g.without_vertices(d);
    let cache = KvCache::new();
    let found = rest
        .vertices()
        .par_iter()
        .map(|&v| Ok((v, find_canonical_k33_cached(&rest, v, &cache)?)))
        .collect::<Result<Vec<_>, RuntimeError>>()?;
    Ok(found
        .into_iter()
        .filter_map(|(v, k)| k.map(|k| (v, k.vertices)))
        .collect())
}
