//! Trajectory solvers.
//!
//! - `benchmark_shortest`: shortest-distance SNR-feasible path, sensing
//!   probability ignored.
//! - `solve_lagrangian` (solution I): Lagrangian relaxation of the
//!   budget-constrained inverse-probability shortest path, solved by LARAC
//!   dual bisection with K-shortest-path primal recovery.
//! - `improve_single_detour` (solution II): deviate from an initial
//!   trajectory at one waypoint toward a high-probability cell.
//! - `improve_multi_waypoint` (solution III): re-tour the initial waypoints
//!   plus several high-probability cells as a fixed-endpoint path TSP.

mod aco;
mod improve;

pub use aco::{aco_path_tsp, AcoParams};
pub use improve::{improve_multi_waypoint, improve_single_detour};

use std::time::Instant;

use crate::graph::{
    check_feasibility, dijkstra, yen_k_shortest, EdgeWeight, Feasibility, PlanGraph, Trajectory,
};

/// Which solver produced a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverTag {
    Benchmark,
    Sol1,
    Sol2,
    Sol3,
}

impl SolverTag {
    pub const ALL: [SolverTag; 4] = [
        SolverTag::Benchmark,
        SolverTag::Sol1,
        SolverTag::Sol2,
        SolverTag::Sol3,
    ];
}

impl std::fmt::Display for SolverTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            SolverTag::Benchmark => "benchmark",
            SolverTag::Sol1 => "sol1",
            SolverTag::Sol2 => "sol2",
            SolverTag::Sol3 => "sol3",
        })
    }
}

impl std::str::FromStr for SolverTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "benchmark" => Ok(SolverTag::Benchmark),
            "sol1" => Ok(SolverTag::Sol1),
            "sol2" => Ok(SolverTag::Sol2),
            "sol3" => Ok(SolverTag::Sol3),
            other => Err(format!("unknown solver `{other}`")),
        }
    }
}

/// Which trajectory seeds the improvement solvers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialTag {
    Sol1,
    Benchmark,
}

impl std::fmt::Display for InitialTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            InitialTag::Sol1 => "sol1",
            InitialTag::Benchmark => "benchmark",
        })
    }
}

impl std::str::FromStr for InitialTag {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sol1" => Ok(InitialTag::Sol1),
            "benchmark" => Ok(InitialTag::Benchmark),
            other => Err(format!("unknown initial trajectory `{other}`")),
        }
    }
}

/// Dual-variable search and primal-recovery knobs for solution I.
#[derive(Debug, Clone)]
pub struct LagrangianParams {
    pub lambda_tolerance: f64,
    pub max_bisection_iters: usize,
    /// K-shortest-path budget for primal recovery.
    pub k: usize,
}

impl Default for LagrangianParams {
    fn default() -> Self {
        Self {
            lambda_tolerance: 1e-6,
            max_bisection_iters: 64,
            k: 100,
        }
    }
}

/// Solver output: the trajectory plus run metadata. For solution I,
/// `dual_bound` is g(λ*), a certified lower bound on the optimal f^P.
#[derive(Debug, Clone)]
pub struct SolverReport {
    pub trajectory: Trajectory,
    pub dual_bound: Option<f64>,
    pub wallclock_s: f64,
    pub solver_tag: SolverTag,
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("instance infeasible: shortest feasible distance {min_distance_m} m exceeds budget {dbar_m} m")]
    Infeasible { min_distance_m: f64, dbar_m: f64 },
    #[error("instance infeasible: start and finish are not connected under the SNR threshold")]
    Disconnected,
}

fn report(tag: SolverTag, trajectory: Trajectory, dual_bound: Option<f64>, t0: Instant) -> SolverReport {
    SolverReport {
        trajectory,
        dual_bound,
        wallclock_s: t0.elapsed().as_secs_f64(),
        solver_tag: tag,
    }
}

/// Shortest-distance trajectory under the SNR constraint; the sensing map
/// plays no role, so its output is independent of the budget once feasible.
pub fn benchmark_shortest(g: &PlanGraph, dbar_m: f64) -> Result<SolverReport, SolverError> {
    let t0 = Instant::now();
    match check_feasibility(g, dbar_m) {
        Feasibility::Feasible(t) => Ok(report(SolverTag::Benchmark, t, None, t0)),
        Feasibility::BudgetExceeded { shortest } => Err(SolverError::Infeasible {
            min_distance_m: shortest.f_d(),
            dbar_m,
        }),
        Feasibility::Disconnected => Err(SolverError::Disconnected),
    }
}

/// Solution I: minimize f^P subject to f^D ≤ D̄ by Lagrangian relaxation.
///
/// The dual `max_λ min_I f^P + λ·f^D` is solved LARAC-style: keep one
/// budget-violating endpoint with low f^P and one feasible endpoint, update
/// λ to the slope that equalizes their aggregated costs, and re-solve a
/// Dijkstra under `W^P + λ·W^D` until the aggregated optimum matches the
/// bracket. Primal recovery then enumerates K loopless paths under the
/// final aggregated weight and keeps the feasible one with least f^P,
/// falling back to the shortest-distance path. Always feasible on feasible
/// instances.
pub fn solve_lagrangian(
    g: &PlanGraph,
    dbar_m: f64,
    params: &LagrangianParams,
) -> Result<SolverReport, SolverError> {
    let t0 = Instant::now();
    let shortest = match check_feasibility(g, dbar_m) {
        Feasibility::Feasible(t) => t,
        Feasibility::BudgetExceeded { shortest } => {
            return Err(SolverError::Infeasible {
                min_distance_m: shortest.f_d(),
                dbar_m,
            })
        }
        Feasibility::Disconnected => return Err(SolverError::Disconnected),
    };

    let (start, finish) = (g.start(), g.finish());
    let unconstrained =
        dijkstra(g, start, finish, EdgeWeight::InverseProb).expect("connected instance");
    if unconstrained.f_d() <= dbar_m {
        // budget inactive: the unconstrained optimum is optimal and its own bound
        let bound = unconstrained.f_p();
        return Ok(report(SolverTag::Sol1, unconstrained, Some(bound), t0));
    }

    // bracket: `lo` violates the budget with low f^P, `hi` is feasible
    let mut lo = unconstrained;
    let mut hi = shortest;
    let mut lambda_star = 0.0;
    // g(0) = unconstrained min f^P is always a valid dual value
    let mut dual_bound = lo.f_p();

    for _ in 0..params.max_bisection_iters {
        let lambda = (lo.f_p() - hi.f_p()) / (hi.f_d() - lo.f_d());
        debug_assert!(lambda >= 0.0);
        lambda_star = lambda;
        let r = dijkstra(g, start, finish, EdgeWeight::Aggregated(lambda))
            .expect("connected instance");
        let agg = |t: &Trajectory| t.f_p() + lambda * t.f_d();
        dual_bound = dual_bound.max(agg(&r) - lambda * dbar_m);
        // both bracket endpoints share an aggregated cost at this λ; if the
        // aggregated optimum already matches it, the dual is solved
        if agg(&hi) - agg(&r) <= params.lambda_tolerance {
            break;
        }
        if r.f_d() <= dbar_m {
            hi = r;
        } else {
            lo = r;
        }
    }

    // primal recovery over the K shortest aggregated-weight paths
    let mut best = hi;
    for t in yen_k_shortest(g, start, finish, EdgeWeight::Aggregated(lambda_star), params.k) {
        if t.f_d() <= dbar_m && t.f_p() < best.f_p() {
            best = t;
        }
    }
    Ok(report(SolverTag::Sol1, best, Some(dual_bound), t0))
}
