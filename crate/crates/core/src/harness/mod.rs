//! Experiment driver: generates corpora, solves, compares with the oracle
//! and evaluates every bound on each instance.

mod output;

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::generators::{generate, GenSpec};
use crate::graph::{Graph, VertexId};
use crate::mds::preprocess::residual_witnesses;
use crate::mds::{solve, Config, DsResult, KvRefresh, Phase2Rule};
use crate::oracle::{exact_mds, OracleError};

pub use output::{read_jsonl, write_csv, write_jsonl, CSV_COLUMNS, CSV_SCHEMA};

/// Names of the evaluated bounds, in CSV order.
pub const BOUND_NAMES: [&str; 5] = [
    "phase1_bound",
    "total_bound",
    "preprocess_size",
    "rounds",
    "postprocess_clean",
];

/// Additive slack of the round check.
pub const ROUND_SLACK: usize = 20;
pub const DEFAULT_ORACLE_LIMIT: usize = 32;
pub const DEFAULT_ORACLE_BUDGET: u64 = 10_000_000;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("thread pool: {0}")]
    Pool(#[from] rayon::ThreadPoolBuildError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Pass,
    Fail,
    Skipped,
}

impl Check {
    fn of(ok: bool) -> Self {
        if ok {
            Check::Pass
        } else {
            Check::Fail
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Check::Pass => "pass",
            Check::Fail => "fail",
            Check::Skipped => "skipped",
        }
    }
}

/// `(c + 1)`: phase 1 picks at most this many vertices per optimum vertex.
pub fn phase1_factor(c: u64) -> u64 {
    c + 1
}

/// `6c²t + (2t + 5)c + 4`; equals 199 for `c = t = 3`.
pub fn total_factor(c: u64, t: u64) -> u64 {
    6 * c * c * t + (2 * t + 5) * c + 4
}

/// The per-instance bound checks, keyed by [`BOUND_NAMES`].
pub type BoundChecks = BTreeMap<String, Check>;

/// Outcome of checking a result against a graph.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verification {
    pub is_dominating: bool,
    /// Structural problems with the result (empty when consistent).
    pub problems: Vec<String>,
    pub bound_checks: BoundChecks,
}

impl Verification {
    pub fn passed(&self) -> bool {
        self.is_dominating && self.problems.is_empty() && !self.bound_checks.values().any(|c| *c == Check::Fail)
    }
}

fn structural_problems(g: &Graph, r: &DsResult) -> Vec<String> {
    let mut problems = Vec::new();
    for (name, part) in [
        ("d_phase1", &r.d_phase1),
        ("d_preprocess", &r.d_preprocess),
        ("d_phase2", &r.d_phase2),
    ] {
        if let Some(v) = part.iter().find(|v| !g.contains(**v)) {
            problems.push(format!("{name} contains unknown vertex {}", v.0));
        }
    }
    let p1: BTreeSet<_> = r.d_phase1.iter().collect();
    if r.d_preprocess.iter().any(|v| p1.contains(v)) {
        problems.push("d_preprocess overlaps d_phase1".into());
    }
    let image: BTreeSet<VertexId> = r.dom_map.values().copied().collect();
    if image != r.d_phase2.iter().copied().collect() {
        problems.push("d_phase2 is not the image of dom_map".into());
    }
    for (v, w) in &r.dom_map {
        let adjacent = v == w || g.has_edge(*v, *w);
        if !adjacent {
            problems.push(format!("dominator {} of {} is not in its closed neighborhood", w.0, v.0));
        }
    }
    let d: Vec<VertexId> = r.d_phase1.iter().chain(&r.d_preprocess).copied().collect();
    if let Ok(covered) = g.neighborhood_of_set(&d) {
        let covered: BTreeSet<_> = covered.into_iter().collect();
        for &v in g.vertices() {
            if !covered.contains(&v) && !r.dom_map.contains_key(&v) {
                problems.push(format!("vertex {} is undominated after preprocessing but has no dominator", v.0));
            }
        }
    }
    if r.rounds() != r.config.expected_rounds() {
        problems.push(format!(
            "trace reports {} rounds, configuration implies {}",
            r.rounds(),
            r.config.expected_rounds()
        ));
    }
    problems
}

/// Checks `r` against `g`. Bounds that need `γ` are skipped when `gamma` is
/// `None`.
pub fn verify_result(g: &Graph, r: &DsResult, gamma: Option<usize>) -> Verification {
    let cfg = &r.config;
    let set = r.dominating_set();
    let is_dominating = set.iter().all(|v| g.contains(*v)) && g.is_dominating_set(&set).unwrap_or(false);
    let problems = structural_problems(g, r);

    let d_after: Vec<VertexId> = r.d_phase1.iter().chain(&r.d_preprocess).copied().collect();
    let clean = residual_witnesses(g, &d_after).map(|w| w.is_empty()).unwrap_or(false);

    let mut checks = BoundChecks::new();
    let gamma = gamma.map(|x| x as u64);
    let phase1 = gamma.map(|gm| (r.d_phase1.len() as u64) <= phase1_factor(cfg.c) * gm);
    // After a clean sweep the residual graph excludes K_{3,3} as a depth-1
    // minor, so t = 3 applies to it; preprocessing adds at most 24g.
    let total = gamma.map(|gm| {
        let t = if cfg.g > 0 && clean { 3 } else { cfg.t };
        let extra = r.d_preprocess.len() as u64;
        (set.len() as u64) - extra <= total_factor(cfg.c, t) * gm && extra <= 24 * cfg.g
    });
    let opt = |o: Option<bool>| o.map(Check::of).unwrap_or(Check::Skipped);
    checks.insert("phase1_bound".into(), opt(phase1));
    checks.insert("total_bound".into(), opt(total));
    checks.insert(
        "preprocess_size".into(),
        Check::of(r.d_preprocess.len() as u64 <= 24 * cfg.g),
    );
    checks.insert(
        "rounds".into(),
        Check::of(r.rounds() <= 12 * cfg.g as usize + ROUND_SLACK),
    );
    checks.insert("postprocess_clean".into(), Check::of(clean));
    Verification {
        is_dominating,
        problems,
        bound_checks: checks,
    }
}

/// Configuration of an experiment; unset fields take the defaults for the
/// genus in use.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct ConfigSpec {
    /// Genus bound; defaults to the certified genus of each instance.
    pub genus: Option<u64>,
    pub c: Option<u64>,
    pub t: Option<u64>,
    pub phase2_rule: Phase2Rule,
    pub kv_refresh: KvRefresh,
}

impl ConfigSpec {
    pub fn resolve(&self, certified_genus: u64) -> Config {
        let mut cfg = Config::for_genus(self.genus.unwrap_or(certified_genus));
        if let Some(c) = self.c {
            cfg.c = c;
        }
        if let Some(t) = self.t {
            cfg.t = t;
        }
        cfg.phase2_rule = self.phase2_rule;
        cfg.kv_refresh = self.kv_refresh;
        cfg
    }
}

/// A corpus entry: one spec, optionally repeated over consecutive seeds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    #[serde(flatten)]
    pub spec: GenSpec,
    /// Number of instances, with seeds `seed, seed + 1, ...`.
    #[serde(default = "one")]
    pub count: u64,
}

fn one() -> u64 {
    1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Manifest {
    pub corpus: Vec<CorpusEntry>,
    #[serde(default)]
    pub config: ConfigSpec,
    #[serde(default = "default_limit")]
    pub oracle_limit: usize,
    #[serde(default = "default_budget")]
    pub oracle_budget: u64,
}

fn default_limit() -> usize {
    DEFAULT_ORACLE_LIMIT
}

fn default_budget() -> u64 {
    DEFAULT_ORACLE_BUDGET
}

impl Manifest {
    pub fn new(corpus: Vec<CorpusEntry>, config: ConfigSpec) -> Self {
        Manifest {
            corpus,
            config,
            oracle_limit: DEFAULT_ORACLE_LIMIT,
            oracle_budget: DEFAULT_ORACLE_BUDGET,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        Ok(serde_json::from_str(text)?)
    }

    /// The individual instance specs, in manifest order.
    pub fn specs(&self) -> Vec<GenSpec> {
        self.corpus
            .iter()
            .flat_map(|e| {
                (0..e.count).map(move |i| GenSpec {
                    seed: e.spec.seed.wrapping_add(i),
                    ..e.spec.clone()
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceDescriptor {
    pub family: String,
    pub params: String,
    pub seed: u64,
    pub shuffle_ids: Option<u64>,
    pub n: usize,
    pub m: usize,
    pub certified_genus: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub instance: InstanceDescriptor,
    pub spec: GenSpec,
    pub config: Option<Config>,
    pub d_size: usize,
    pub preprocess_size: usize,
    pub d_prime_size: usize,
    pub total: usize,
    pub is_dominating: bool,
    pub gamma: Option<usize>,
    pub ratio: Option<f64>,
    pub rounds_phase1: usize,
    pub rounds_preprocess: usize,
    pub rounds_phase2: usize,
    pub rounds_total: usize,
    pub bound_checks: BoundChecks,
    pub explored_nodes: Option<u64>,
    pub result: Option<DsResult>,
    pub error: Option<String>,
}

impl ExperimentRecord {
    fn failed(spec: &GenSpec, instance: InstanceDescriptor, config: Option<Config>, error: String) -> Self {
        ExperimentRecord {
            instance,
            spec: spec.clone(),
            config,
            d_size: 0,
            preprocess_size: 0,
            d_prime_size: 0,
            total: 0,
            is_dominating: false,
            gamma: None,
            ratio: None,
            rounds_phase1: 0,
            rounds_preprocess: 0,
            rounds_phase2: 0,
            rounds_total: 0,
            bound_checks: BOUND_NAMES.iter().map(|b| (b.to_string(), Check::Skipped)).collect(),
            explored_nodes: None,
            result: None,
            error: Some(error),
        }
    }

    /// True when the instance solved, dominated, and no bound failed.
    pub fn passed(&self) -> bool {
        self.error.is_none() && self.is_dominating && !self.bound_checks.values().any(|c| *c == Check::Fail)
    }
}

/// Solves one instance and evaluates its checks.
pub fn run_instance(spec: &GenSpec, config: &ConfigSpec, oracle_limit: usize, oracle_budget: u64) -> ExperimentRecord {
    let mut instance = InstanceDescriptor {
        family: spec.family.name().into(),
        params: spec.family.params(),
        seed: spec.seed,
        shuffle_ids: spec.shuffle_ids,
        n: 0,
        m: 0,
        certified_genus: 0,
    };
    let gen = match generate(spec) {
        Ok(g) => g,
        Err(e) => return ExperimentRecord::failed(spec, instance, None, e.to_string()),
    };
    let g = &gen.graph;
    instance.n = g.num_vertices();
    instance.m = g.num_edges();
    instance.certified_genus = gen.certified_genus;
    let cfg = config.resolve(gen.certified_genus);
    let result = match solve(g, &cfg) {
        Ok(r) => r,
        Err(e) => return ExperimentRecord::failed(spec, instance, Some(cfg), e.to_string()),
    };
    let mut error = None;
    let (gamma, explored) = if g.num_vertices() <= oracle_limit {
        match exact_mds(g, oracle_budget) {
            Ok(o) => (Some(o.gamma), Some(o.explored_nodes)),
            Err(e @ OracleError::BudgetExhausted { .. }) => {
                error = Some(format!("oracle: {e}"));
                (None, Some(oracle_budget))
            }
            Err(e) => return ExperimentRecord::failed(spec, instance, Some(cfg), e.to_string()),
        }
    } else {
        (None, None)
    };
    let v = verify_result(g, &result, gamma);
    if !v.problems.is_empty() {
        error = Some(v.problems.join("; "));
    }
    let total = result.size();
    let phase1 = result.rounds_of("phase1");
    let phase2 = result.rounds_of("phase2");
    ExperimentRecord {
        instance,
        spec: spec.clone(),
        config: Some(cfg),
        d_size: result.d_phase1.len(),
        preprocess_size: result.d_preprocess.len(),
        d_prime_size: result.d_phase2.len(),
        total,
        is_dominating: v.is_dominating,
        ratio: gamma.filter(|&gm| gm > 0).map(|gm| total as f64 / gm as f64),
        gamma,
        rounds_phase1: phase1,
        rounds_preprocess: result.rounds() - phase1 - phase2,
        rounds_phase2: phase2,
        rounds_total: result.rounds(),
        bound_checks: v.bound_checks,
        explored_nodes: explored,
        result: Some(result),
        error,
    }
}

/// Runs every instance of the manifest on `jobs` threads (0 = all cores).
/// Records are sorted by instance descriptor.
pub fn run_experiment(manifest: &Manifest, jobs: usize) -> Result<Vec<ExperimentRecord>, HarnessError> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs).build()?;
    let specs = manifest.specs();
    let mut records: Vec<ExperimentRecord> = pool.install(|| {
        specs
            .par_iter()
            .map(|s| run_instance(s, &manifest.config, manifest.oracle_limit, manifest.oracle_budget))
            .collect()
    });
    records.sort_by(|a, b| a.instance.cmp(&b.instance));
    Ok(records)
}

/// Recomputes the checks of a stored record from its own spec and result.
/// Returns the names of checks whose outcome differs.
pub fn reverify_record(record: &ExperimentRecord) -> Result<Vec<String>, String> {
    let gen = generate(&record.spec).map_err(|e| e.to_string())?;
    let Some(result) = &record.result else {
        return Ok(Vec::new());
    };
    let v = verify_result(&gen.graph, result, record.gamma);
    let mut diff: Vec<String> = BOUND_NAMES
        .iter()
        .filter(|b| v.bound_checks.get(**b) != record.bound_checks.get(**b))
        .map(|b| b.to_string())
        .collect();
    if v.is_dominating != record.is_dominating {
        diff.push("is_dominating".into());
    }
    Ok(diff)
}
