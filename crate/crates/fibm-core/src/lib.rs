//! Fair influence blocking maximization under demographic parity.
//!
//! Given a directed social graph, a disjoint community partition, and a
//! negative seed set, this crate selects positive (immunized) seed sets that
//! trade off blocking effectiveness against demographic-parity fairness.
//! Selection runs over a valid-reverse-reachable (VRR) path index with lazy
//! greedy variants (CELF-R, CELF, full computation), sweeps the scalarization
//! weight to build Pareto fronts, and cross-checks every estimator against
//! exact and Monte Carlo linear-threshold diffusion oracles.

pub mod cli;
pub mod config;
pub mod diffusion;
pub mod error;
pub mod graph;
pub mod objective;
pub mod optimize;
pub mod parallel;
pub mod partition;
pub mod problem;
pub mod report;
pub mod rng;
pub mod sweep;
pub mod synth;
pub mod validate;
pub mod vrr;

pub use error::{Error, Result};
pub use graph::{load_edge_list, top_degree_seeds, Graph, NodeId, WeightMode};
pub use partition::{load_communities, CommunityPartition};
pub use problem::ProblemInstance;
