//! Planning toolkit for a UAV that must sense a randomly located target
//! while staying connected to ground base stations.
//!
//! The target's location is unknown but its distribution is known a priori
//! and stored as a per-grid probability map. The toolkit builds an expected
//! SNR map from a configurable obstacle-aware channel model, integrates a
//! Gaussian-mixture target distribution over the grid, and plans trajectories
//! between fixed endpoints that maximize the total probability of sensing
//! the target, subject to a per-waypoint minimum expected SNR and a total
//! flying-distance budget.
//!
//! Modules follow the pipeline:
//!
//! - [`scenario`] — problem-instance data model and scenario files
//! - [`radio`] — channel gains and the expected SNR map
//! - [`targetmap`] — target location distribution map and sampling
//! - [`graph`] — dual-weighted grid graph, Dijkstra, Yen K-shortest paths
//! - [`solvers`] — benchmark planner plus three improvement solvers
//! - [`eval`] — objective evaluation, Monte Carlo validation, oracles, sweeps

pub mod eval;
pub mod graph;
pub mod radio;
pub mod scenario;
pub mod seed;
pub mod solvers;
pub mod targetmap;

pub use graph::{PlanGraph, Trajectory};
pub use radio::SnrMap;
pub use scenario::{GridIndex, GridSpec, ScenarioConfig};
pub use targetmap::TargetMap;
