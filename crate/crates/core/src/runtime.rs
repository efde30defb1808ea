//! Synchronous LOCAL-model executor.
//!
//! With unbounded messages, `r` synchronous rounds give a vertex exactly the
//! information in its radius-`r` ball. The runtime therefore hands each node
//! program a [`LocalView`] of that ball (plus the annotations of the vertices
//! inside it) instead of simulating individual messages, and charges the
//! program's declared radius as its round cost.
//!
//! Phases are barriers: every vertex finishes phase `k` before phase `k + 1`
//! reads its outputs. Within a phase the per-vertex decisions run in
//! parallel; results are keyed by vertex so the schedule is unobservable.

use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Ball, Graph, GraphError, VertexId};

/// A value a phase stores on a vertex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Value {
    Flag(bool),
    Count(u64),
    Vertex(Option<VertexId>),
    Set(Vec<VertexId>),
}

impl Value {
    pub fn as_flag(&self) -> Option<bool> {
        match self {
            Value::Flag(b) => Some(*b),
            _ => None,
        }
    }

    pub fn as_count(&self) -> Option<u64> {
        match self {
            Value::Count(c) => Some(*c),
            _ => None,
        }
    }

    pub fn as_vertex(&self) -> Option<Option<VertexId>> {
        match self {
            Value::Vertex(v) => Some(*v),
            _ => None,
        }
    }

    pub fn as_set(&self) -> Option<&[VertexId]> {
        match self {
            Value::Set(s) => Some(s),
            _ => None,
        }
    }
}

/// Per-vertex annotation record: field name to value.
pub type Record = BTreeMap<String, Value>;

/// Annotations for a whole graph.
pub type Annotations = BTreeMap<VertexId, Record>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RuntimeError {
    #[error("locality violation: program at {center} read vertex {requested} outside its radius-{radius} ball")]
    LocalityViolation {
        center: VertexId,
        requested: VertexId,
        radius: usize,
    },
    #[error("vertex {vertex} has no annotation `{field}`")]
    MissingAnnotation { vertex: VertexId, field: String },
    #[error("annotation `{field}` on {vertex} has the wrong type")]
    AnnotationType { vertex: VertexId, field: String },
    #[error("phase `{phase}` consumes `{field}`, which no earlier phase produces")]
    UnsatisfiedDependency { phase: String, field: String },
    #[error("annotations reference vertex {0}, which is not in the graph")]
    ForeignAnnotation(VertexId),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// Rounds consumed by one executed phase.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundTrace {
    pub phase_name: String,
    pub rounds_used: usize,
}

pub fn total_rounds(traces: &[RoundTrace]) -> usize {
    traces.iter().map(|t| t.rounds_used).sum()
}

/// Everything a vertex may read in one phase: its ball and the annotations
/// of the vertices inside it.
#[derive(Debug)]
pub struct LocalView<'a> {
    ball: Ball,
    annotations: BTreeMap<VertexId, &'a Record>,
}

impl<'a> LocalView<'a> {
    pub fn new(ball: Ball, all: &'a Annotations) -> Self {
        let annotations = ball
            .subgraph
            .vertices()
            .iter()
            .filter_map(|v| all.get(v).map(|r| (*v, r)))
            .collect();
        LocalView { ball, annotations }
    }

    pub fn center(&self) -> VertexId {
        self.ball.center
    }

    pub fn radius(&self) -> usize {
        self.ball.radius
    }

    /// The induced graph on the ball. Adjacency of vertices on the boundary
    /// (distance `radius`) is truncated to edges inside the ball.
    pub fn graph(&self) -> &Graph {
        &self.ball.subgraph
    }

    fn check(&self, v: VertexId) -> Result<(), RuntimeError> {
        if self.ball.subgraph.contains(v) {
            Ok(())
        } else {
            Err(RuntimeError::LocalityViolation {
                center: self.ball.center,
                requested: v,
                radius: self.ball.radius,
            })
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Result<Vec<VertexId>, RuntimeError> {
        self.check(v)?;
        Ok(self.ball.subgraph.neighbors(v)?)
    }

    pub fn annotation(&self, v: VertexId, field: &str) -> Result<&Value, RuntimeError> {
        self.check(v)?;
        self.annotations
            .get(&v)
            .and_then(|r| r.get(field))
            .ok_or_else(|| RuntimeError::MissingAnnotation {
                vertex: v,
                field: field.to_string(),
            })
    }

    pub fn flag(&self, v: VertexId, field: &str) -> Result<bool, RuntimeError> {
        self.annotation(v, field)?
            .as_flag()
            .ok_or_else(|| RuntimeError::AnnotationType {
                vertex: v,
                field: field.to_string(),
            })
    }

    pub fn set(&self, v: VertexId, field: &str) -> Result<&[VertexId], RuntimeError> {
        self.annotation(v, field)?
            .as_set()
            .ok_or_else(|| RuntimeError::AnnotationType {
                vertex: v,
                field: field.to_string(),
            })
    }
}

/// A deterministic per-vertex algorithm that reads only its radius-`r` view.
pub trait NodeProgram: Send + Sync {
    fn name(&self) -> String;

    /// Radius of the ball the program reads; also its round cost.
    fn radius(&self) -> usize;

    /// Fixed extra rounds the phase declares on top of its radius.
    fn overhead(&self) -> usize {
        0
    }

    /// Annotation fields the program reads.
    fn consumes(&self) -> Vec<String>;

    /// Annotation field the program writes on every vertex.
    fn produces(&self) -> String;

    fn decide(&self, view: &LocalView<'_>) -> Result<Value, RuntimeError>;
}

/// Runs `prog` at every vertex of `g`.
pub fn run_program(
    g: &Graph,
    prog: &dyn NodeProgram,
    annotations: &Annotations,
) -> Result<(BTreeMap<VertexId, Value>, RoundTrace), RuntimeError> {
    if let Some(v) = annotations.keys().find(|v| !g.contains(**v)) {
        return Err(RuntimeError::ForeignAnnotation(*v));
    }
    let radius = prog.radius();
    let outputs = g
        .vertices()
        .par_iter()
        .map(|&v| {
            let view = LocalView::new(g.closed_ball(v, radius)?, annotations);
            Ok((v, prog.decide(&view)?))
        })
        .collect::<Result<Vec<_>, RuntimeError>>()?;
    let trace = RoundTrace {
        phase_name: prog.name(),
        rounds_used: radius + prog.overhead(),
    };
    Ok((outputs.into_iter().collect(), trace))
}

/// Phases executed in sequence, each phase's output stored as an annotation
/// field for the phases after it.
pub struct Pipeline {
    phases: Vec<Box<dyn NodeProgram>>,
}

#[derive(Debug, Clone)]
pub struct PipelineRun {
    pub annotations: Annotations,
    pub traces: Vec<RoundTrace>,
}

impl PipelineRun {
    pub fn rounds(&self) -> usize {
        total_rounds(&self.traces)
    }
}

impl Pipeline {
    /// Checks that every consumed field is either in `initial_fields` or
    /// produced by an earlier phase.
    pub fn new(
        phases: Vec<Box<dyn NodeProgram>>,
        initial_fields: &[&str],
    ) -> Result<Self, RuntimeError> {
        let mut available: BTreeSet<String> =
            initial_fields.iter().map(|s| s.to_string()).collect();
        for p in &phases {
            if let Some(field) = p.consumes().into_iter().find(|f| !available.contains(f)) {
                return Err(RuntimeError::UnsatisfiedDependency {
                    phase: p.name(),
                    field,
                });
            }
            available.insert(p.produces());
        }
        Ok(Pipeline { phases })
    }

    pub fn len(&self) -> usize {
        self.phases.len()
    }

    pub fn phases(&self) -> &[Box<dyn NodeProgram>] {
        &self.phases
    }

    pub fn is_empty(&self) -> bool {
        self.phases.is_empty()
    }

    pub fn run(&self, g: &Graph, initial: Annotations) -> Result<PipelineRun, RuntimeError> {
        let mut annotations = initial;
        let mut traces = Vec::with_capacity(self.phases.len());
        for p in &self.phases {
            let (out, trace) = run_program(g, p.as_ref(), &annotations)?;
            let field = p.produces();
            for (v, value) in out {
                annotations.entry(v).or_default().insert(field.clone(), value);
            }
            traces.push(trace);
        }
        Ok(PipelineRun {
            annotations,
            traces,
        })
    }
}

/// Reads one typed field of every vertex out of a finished run.
pub fn collect_field<T>(
    annotations: &Annotations,
    field: &str,
    f: impl Fn(&Value) -> Option<T>,
) -> BTreeMap<VertexId, T> {
    annotations
        .iter()
        .filter_map(|(v, r)| r.get(field).and_then(&f).map(|x| (*v, x)))
        .collect()
}
