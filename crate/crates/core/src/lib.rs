//! Cluster-based average consensus with energy-aware activation.
//!
//! Nodes scattered in a square field are grouped into candidate clusters
//! (a head plus its nearest neighbours). Activating a cluster replaces every
//! member's reading by the in-cluster mean, which the members compute in one
//! simultaneous over-the-air transmission to the head followed by a single
//! broadcast back. The activation probabilities are chosen to minimize
//!
//! ```text
//! xi(p) + alpha * ||c(p)||_1
//! ```
//!
//! where `xi(p)` is the second-largest eigenvalue of the expected weight
//! matrix (the mean-square contraction rate) and `c(p)` the expected
//! per-node transmit energy. The [`simulator`] then replays the resulting
//! gossip process to measure the error/energy trade-off.
//!
//! Module map:
//! - [`topology`]: node placement and the squared-distance matrix.
//! - [`candidates`]: candidate enumeration, averaging matrices, pruning.
//! - [`energy`]: the transmit-energy model and per-candidate costs.
//! - [`optimizer`]: the spectral objective and its projected-subgradient solver.
//! - [`simulator`]: Monte-Carlo replay of the asynchronous consensus process.

// `!(x >= 0.0)` style checks are used on purpose: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod candidates;
pub mod energy;
pub mod error;
pub mod optimizer;
pub mod pool;
pub mod simulator;
pub mod topology;

pub use candidates::{build_weight_matrix, enumerate_candidates, prune_dominated, ClusterCandidate, WeightMatrix};
pub use energy::{CostVector, EnergyParams};
pub use error::{Error, Result};
pub use optimizer::{optimize, ActivationDistribution, OptimizeOutcome, OptimizerOptions};
pub use pool::CandidatePool;
pub use simulator::{AveragedTrace, NetworkState, Scenario, SimulationTrace};
pub use topology::Topology;
