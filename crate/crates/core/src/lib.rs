//! Network resilience simulation.
//!
//! Graphs come from files ([`ingest`]) or synthetic models ([`generators`]),
//! are attacked by one of six node or edge removal strategies ([`attacks`]),
//! and are measured through the size and average path length of their
//! largest connected component ([`metrics`]). [`harness`] runs whole sweeps
//! over sources, strategies and seeded replicas.
//!
//! Replica-level work and per-source BFS in path-length computations run on
//! rayon when the default `parallel` feature is on; see [`Execution`].

pub mod attacks;
pub mod generators;
pub mod graph;
pub mod harness;
pub mod ingest;
pub mod metrics;
pub mod parallel;
pub mod rng;

pub use attacks::{AttackKind, AttackPlan, PlanOptions};
pub use generators::{GeneratorSpec, Model, ReferenceNetwork};
pub use graph::{EdgeKey, Graph, GraphError, NodeId};
pub use harness::{ExperimentConfig, ExperimentResult};
pub use metrics::{NetworkStats, ResilienceSeries};
pub use parallel::Execution;
