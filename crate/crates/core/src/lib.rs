//! Local approximation of minimum dominating sets on planar and
//! bounded-genus graphs, with a LOCAL-model simulator, depth-1 minor
//! tooling, exact oracles, graph generators and an experiment harness.

pub(crate) mod bitset;
pub mod edgelist;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod mds;
pub mod minor;
pub mod oracle;
pub mod runtime;

pub use generators::{generate, Family, GenSpec, Generated};
pub use graph::{Ball, Graph, GraphError, VertexId};
pub use mds::{solve, Config, DsResult, KvRefresh, MdsError, Phase2Rule};
pub use minor::{has_k_t3_depth1_minor, MinorModel, StarDecomposition};
pub use oracle::{exact_mds, OracleResult};
pub use runtime::{LocalView, NodeProgram, Pipeline, RoundTrace};
