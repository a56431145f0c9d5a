//! Objective evaluation, Monte Carlo validation, small-instance oracles,
//! and budget/granularity sweeps.
//!
//! The objective is the probability mass over the distinct cells a
//! trajectory visits; revisits count once. The brute-force oracles guard on
//! instance size and hard-fail rather than truncating their enumeration.

use std::time::Instant;

use crate::graph::{check_feasibility, Feasibility, PlanGraph, Trajectory};
use crate::scenario::{GridIndex, ScenarioConfig};
use crate::seed::derive_seed;
use crate::solvers::{
    benchmark_shortest, improve_multi_waypoint, improve_single_detour, solve_lagrangian,
    AcoParams, InitialTag, LagrangianParams, SolverError, SolverTag,
};
use crate::targetmap::{obstacle_mask, TargetMap, TargetMapError, TargetSampler};

/// Total sensing probability of a trajectory: mass over distinct visited
/// cells, accumulated in canonical cell order.
pub fn total_probability(t: &Trajectory, target: &TargetMap) -> f64 {
    let d = target.dimension();
    let mut seen = vec![false; d * d];
    for w in t.waypoints() {
        seen[w.i * d + w.j] = true;
    }
    (0..d * d)
        .filter(|v| seen[*v])
        .map(|v| target.prob(v / d, v % d))
        .sum()
}

/// Monte Carlo check of the analytic objective.
#[derive(Debug, Clone)]
pub struct McReport {
    pub analytic: f64,
    pub empirical: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_samples: usize,
}

impl McReport {
    /// Inclusive CI membership with a float-noise guard far below the
    /// statistical scale of the interval.
    pub fn analytic_inside_ci(&self) -> bool {
        self.analytic >= self.ci_low - 1e-12 && self.analytic <= self.ci_high + 1e-12
    }
}

/// Samples targets from the truncated mixture; a draw succeeds when it lands
/// in a cell the trajectory visits. Returns the success rate with a 99%
/// Wilson score interval.
pub fn monte_carlo_validate(
    t: &Trajectory,
    config: &ScenarioConfig,
    n_samples: usize,
    seed: u64,
) -> Result<McReport, TargetMapError> {
    assert!(n_samples >= 1, "need at least one sample");
    let blocked = obstacle_mask(&config.grid, &config.obstacles);
    let target = crate::targetmap::build_target_map(config, &blocked)?;
    let analytic = total_probability(t, &target);

    let d = config.grid.dimension();
    let mut visited = vec![false; d * d];
    for w in t.waypoints() {
        visited[config.grid.linear(*w)] = true;
    }

    let mut sampler = TargetSampler::new(config, &blocked, seed);
    let mut hits = 0usize;
    for _ in 0..n_samples {
        let p = sampler.sample()?;
        if visited[config.grid.linear(sampler.cell_of(p))] {
            hits += 1;
        }
    }
    let (ci_low, ci_high) = wilson_interval(hits, n_samples, 2.5758293035489004);
    Ok(McReport {
        analytic,
        empirical: hits as f64 / n_samples as f64,
        ci_low,
        ci_high,
        n_samples,
    })
}

/// Wilson score interval for a binomial proportion at normal quantile `z`.
/// The boundary outcomes pin the exact endpoint: all hits give an upper
/// bound of exactly 1, no hits a lower bound of exactly 0.
fn wilson_interval(hits: usize, n: usize, z: f64) -> (f64, f64) {
    let n_f = n as f64;
    let p = hits as f64 / n_f;
    let z2 = z * z;
    let denom = 1.0 + z2 / n_f;
    let center = (p + z2 / (2.0 * n_f)) / denom;
    let half = z * (p * (1.0 - p) / n_f + z2 / (4.0 * n_f * n_f)).sqrt() / denom;
    let lo = if hits == 0 { 0.0 } else { (center - half).max(0.0) };
    let hi = if hits == n { 1.0 } else { (center + half).min(1.0) };
    (lo, hi)
}

/// Result of an exhaustive small-instance search.
#[derive(Debug, Clone)]
pub struct OracleResult {
    pub optimum_value: f64,
    pub optimum_path: Trajectory,
    pub paths_enumerated: u64,
}

#[derive(Debug, thiserror::Error)]
pub enum EvalError {
    #[error("instance too large for exhaustive search: {vertices} vertices exceeds guard {guard}")]
    TooLarge { vertices: usize, guard: usize },
}

/// Octile lower bound on the remaining distance to `dst`.
fn remaining_lb(g: &PlanGraph, v: usize, dst: usize) -> f64 {
    let d = g.dimension();
    let (vi, vj) = (v / d, v % d);
    let (ti, tj) = (dst / d, dst % d);
    let di = vi.abs_diff(ti) as f64;
    let dj = vj.abs_diff(tj) as f64;
    let (hi, lo) = if di > dj { (di, dj) } else { (dj, di) };
    ((hi - lo) + lo * std::f64::consts::SQRT_2) * g.delta()
}

struct DfsState<'a> {
    g: &'a PlanGraph,
    dst: usize,
    dbar: f64,
    on_path: Vec<bool>,
    path: Vec<usize>,
    enumerated: u64,
}

fn enumerate_simple_paths(
    g: &PlanGraph,
    dbar_m: f64,
    guard: usize,
    mut visit: impl FnMut(&[usize], f64),
) -> Result<u64, EvalError> {
    let vertices = g.vertex_count();
    if vertices > guard {
        return Err(EvalError::TooLarge { vertices, guard });
    }
    let src = g.linear(g.start());
    let dst = g.linear(g.finish());
    let mut st = DfsState {
        g,
        dst,
        dbar: dbar_m,
        on_path: vec![false; g.grid().cell_count()],
        path: vec![src],
        enumerated: 0,
    };
    st.on_path[src] = true;

    fn dfs(st: &mut DfsState, v: usize, dist: f64, visit: &mut impl FnMut(&[usize], f64)) {
        if v == st.dst {
            st.enumerated += 1;
            visit(&st.path, dist);
            // the DFS continues past the destination: longer simple paths
            // through it are still valid candidates for max-probability
        }
        let neighbors: Vec<usize> = st.g.neighbors(v).collect();
        for w in neighbors {
            if st.on_path[w] {
                continue;
            }
            let next = dist + st.g.edge_distance(v, w);
            if next + remaining_lb(st.g, w, st.dst) > st.dbar {
                continue;
            }
            st.on_path[w] = true;
            st.path.push(w);
            dfs(st, w, next, visit);
            st.path.pop();
            st.on_path[w] = false;
        }
    }
    dfs(&mut st, src, 0.0, &mut visit);
    Ok(st.enumerated)
}

/// Exhaustive minimum of f^P over simple start→finish paths with
/// `f^D ≤ D̄`. Guarded at 20 vertices; `Ok(None)` when no path fits.
pub fn brute_force_csp(g: &PlanGraph, dbar_m: f64) -> Result<Option<OracleResult>, EvalError> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let enumerated = enumerate_simple_paths(g, dbar_m, 20, |path, _dist| {
        let f_p: f64 = path.iter().map(|v| g.inverse_weight(*v)).sum();
        match &best {
            Some((b, _)) if *b <= f_p => {}
            _ => best = Some((f_p, path.to_vec())),
        }
    })?;
    Ok(best.map(|(value, path)| OracleResult {
        optimum_value: value,
        optimum_path: to_trajectory(g, path),
        paths_enumerated: enumerated,
    }))
}

/// Exhaustive maximum of the distinct-cell probability over simple
/// start→finish paths with `f^D ≤ D̄`. Guarded at 16 vertices.
pub fn brute_force_max_prob(
    g: &PlanGraph,
    dbar_m: f64,
) -> Result<Option<OracleResult>, EvalError> {
    let mut best: Option<(f64, Vec<usize>)> = None;
    let enumerated = enumerate_simple_paths(g, dbar_m, 16, |path, _dist| {
        // simple paths visit distinct cells by construction
        let prob: f64 = path.iter().map(|v| g.prob(*v)).sum();
        match &best {
            Some((b, _)) if *b >= prob => {}
            _ => best = Some((prob, path.to_vec())),
        }
    })?;
    Ok(best.map(|(value, path)| OracleResult {
        optimum_value: value,
        optimum_path: to_trajectory(g, path),
        paths_enumerated: enumerated,
    }))
}

fn to_trajectory(g: &PlanGraph, path: Vec<usize>) -> Trajectory {
    let wps: Vec<GridIndex> = path.into_iter().map(|v| g.index_of(v)).collect();
    Trajectory::new(wps, g).expect("enumerated paths are structurally valid")
}

/// A constraint the checker found violated.
#[derive(Debug, thiserror::Error)]
pub enum ConstraintViolation {
    #[error("trajectory starts at {got}, expected {expected}")]
    WrongStart { got: GridIndex, expected: GridIndex },
    #[error("trajectory ends at {got}, expected {expected}")]
    WrongFinish { got: GridIndex, expected: GridIndex },
    #[error("waypoint {position} at {index} fails the SNR threshold")]
    InfeasibleWaypoint { position: usize, index: GridIndex },
    #[error("segment {position}: {from} -> {to} is not an adjacency step")]
    NonAdjacent {
        position: usize,
        from: GridIndex,
        to: GridIndex,
    },
    #[error("distance {f_d_m} m exceeds budget {dbar_m} m")]
    OverBudget { f_d_m: f64, dbar_m: f64 },
}

/// Re-checks endpoints, vertex feasibility, adjacency, and the budget
/// against the graph the trajectory should live on.
pub fn verify_constraints(
    t: &Trajectory,
    g: &PlanGraph,
    dbar_m: f64,
) -> Result<(), ConstraintViolation> {
    if t.first() != g.start() {
        return Err(ConstraintViolation::WrongStart {
            got: t.first(),
            expected: g.start(),
        });
    }
    if t.last() != g.finish() {
        return Err(ConstraintViolation::WrongFinish {
            got: t.last(),
            expected: g.finish(),
        });
    }
    for (n, w) in t.waypoints().iter().enumerate() {
        if !g.contains(*w) {
            return Err(ConstraintViolation::InfeasibleWaypoint {
                position: n,
                index: *w,
            });
        }
    }
    for (n, pair) in t.waypoints().windows(2).enumerate() {
        let (a, b) = (pair[0], pair[1]);
        if a == b || a.i.abs_diff(b.i) > 1 || a.j.abs_diff(b.j) > 1 {
            return Err(ConstraintViolation::NonAdjacent {
                position: n,
                from: a,
                to: b,
            });
        }
    }
    if t.f_d() > dbar_m {
        return Err(ConstraintViolation::OverBudget {
            f_d_m: t.f_d(),
            dbar_m,
        });
    }
    Ok(())
}

/// One sweep measurement. `initial` is set for the improvement solvers;
/// infeasible budget points keep NaN metrics.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub dbar_m: f64,
    pub solver: SolverTag,
    pub initial: Option<InitialTag>,
    pub feasible: bool,
    pub total_prob: f64,
    pub f_d_m: f64,
    pub wallclock_s: f64,
}

#[derive(Debug, Clone, Default)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// CSV with the fixed column set; infeasible rows carry `nan`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dbar_m,solver,initial,total_prob,f_d_m,wallclock_s\n");
        for r in &self.rows {
            let initial = r.initial.map_or("none".to_string(), |i| i.to_string());
            let fmt = |v: f64| {
                if v.is_nan() {
                    "nan".to_string()
                } else {
                    format!("{v}")
                }
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.dbar_m,
                r.solver,
                initial,
                fmt(r.total_prob),
                fmt(r.f_d_m),
                r.wallclock_s
            ));
        }
        out
    }

    pub fn total_wallclock_s(&self) -> f64 {
        self.rows.iter().map(|r| r.wallclock_s).sum()
    }
}

/// Sweep configuration: which solvers to run and their parameters.
#[derive(Debug, Clone)]
pub struct SweepParams {
    pub solvers: Vec<SolverTag>,
    pub lagrangian: LagrangianParams,
    pub aco: AcoParams,
    pub r_i: usize,
    pub r_ii: usize,
    /// Master seed; per-row ACO seeds are derived from it.
    pub seed: u64,
}

impl Default for SweepParams {
    fn default() -> Self {
        Self {
            solvers: SolverTag::ALL.to_vec(),
            lagrangian: LagrangianParams::default(),
            aco: AcoParams::default(),
            r_i: 10,
            r_ii: 10,
            seed: 0,
        }
    }
}

/// Runs each requested solver at each budget. The improvement solvers run
/// with both the solution-I and the benchmark initial trajectory; their
/// wallclock includes the time to produce that initial, mirroring the cost
/// of the full design. Infeasible budgets are recorded as such.
pub fn sweep(
    g: &PlanGraph,
    dbar_list: &[f64],
    params: &SweepParams,
) -> Result<SweepResult, SolverError> {
    let mut rows = Vec::new();
    let want = |tag: SolverTag| params.solvers.contains(&tag);

    for (di, &dbar) in dbar_list.iter().enumerate() {
        let feasible = matches!(check_feasibility(g, dbar), Feasibility::Feasible(_));
        if !feasible {
            for &tag in &params.solvers {
                let initials: &[Option<InitialTag>] = match tag {
                    SolverTag::Sol2 | SolverTag::Sol3 => {
                        &[Some(InitialTag::Sol1), Some(InitialTag::Benchmark)]
                    }
                    _ => &[None],
                };
                for &initial in initials {
                    rows.push(SweepRow {
                        dbar_m: dbar,
                        solver: tag,
                        initial,
                        feasible: false,
                        total_prob: f64::NAN,
                        f_d_m: f64::NAN,
                        wallclock_s: 0.0,
                    });
                }
            }
            continue;
        }

        let bench = benchmark_shortest(g, dbar)?;
        let sol1 = solve_lagrangian(g, dbar, &params.lagrangian)?;

        if want(SolverTag::Benchmark) {
            rows.push(checked_row(g, dbar, SolverTag::Benchmark, None, &bench.trajectory, bench.wallclock_s));
        }
        if want(SolverTag::Sol1) {
            rows.push(checked_row(g, dbar, SolverTag::Sol1, None, &sol1.trajectory, sol1.wallclock_s));
        }
        for (initial_tag, initial, initial_time) in [
            (InitialTag::Sol1, &sol1.trajectory, sol1.wallclock_s),
            (InitialTag::Benchmark, &bench.trajectory, bench.wallclock_s),
        ] {
            if want(SolverTag::Sol2) {
                let r = improve_single_detour(g, initial, params.r_i, dbar);
                rows.push(checked_row(
                    g,
                    dbar,
                    SolverTag::Sol2,
                    Some(initial_tag),
                    &r.trajectory,
                    initial_time + r.wallclock_s,
                ));
            }
            if want(SolverTag::Sol3) {
                let aco = AcoParams {
                    rng_seed: derive_seed(params.seed, &format!("sweep/sol3/{di}/{initial_tag}")),
                    ..params.aco.clone()
                };
                let r = improve_multi_waypoint(g, initial, params.r_ii, dbar, &aco);
                rows.push(checked_row(
                    g,
                    dbar,
                    SolverTag::Sol3,
                    Some(initial_tag),
                    &r.trajectory,
                    initial_time + r.wallclock_s,
                ));
            }
        }
    }
    Ok(SweepResult { rows })
}

fn row_from(
    dbar: f64,
    solver: SolverTag,
    initial: Option<InitialTag>,
    t: &Trajectory,
    wallclock_s: f64,
) -> SweepRow {
    SweepRow {
        dbar_m: dbar,
        solver,
        initial,
        feasible: true,
        total_prob: t.total_prob(),
        f_d_m: t.f_d(),
        wallclock_s,
    }
}

/// Every trajectory a sweep records has already passed the constraint
/// checker; a violation here is a solver bug, not an input error.
fn checked_row(
    g: &PlanGraph,
    dbar: f64,
    solver: SolverTag,
    initial: Option<InitialTag>,
    t: &Trajectory,
    wallclock_s: f64,
) -> SweepRow {
    if let Err(v) = verify_constraints(t, g, dbar) {
        panic!("{solver} produced an invalid trajectory: {v}");
    }
    row_from(dbar, solver, initial, t, wallclock_s)
}

/// Wallclock helper for callers that time around a solver invocation.
pub fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let t0 = Instant::now();
    let out = f();
    (out, t0.elapsed().as_secs_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::tests::{graph_with_probs, grid_graph};
    use crate::graph::{dijkstra, EdgeWeight};
    use crate::radio::ChannelParams;
    use crate::scenario::{Budget, Gbs, GmmComponent, GridSpec, Point2, Point3};

    #[test]
    fn total_probability_counts_distinct_cells_once() {
        let dim = 4;
        let mut probs = vec![0.0; 16];
        probs[0] = 0.07;
        probs[5] = 0.5;
        probs[10] = 0.43;
        let g = graph_with_probs(dim, &probs, &[], (0, 0), (0, 0));
        let target = TargetMap::from_probs(dim, probs, 1e-12).unwrap();

        let single = Trajectory::new(vec![GridIndex::new(0, 0)], &g).unwrap();
        assert!((total_probability(&single, &target) - 0.07).abs() < 1e-15);

        let revisit = Trajectory::new(
            vec![
                GridIndex::new(0, 0),
                GridIndex::new(1, 1),
                GridIndex::new(0, 0),
            ],
            &g,
        )
        .unwrap();
        let once = Trajectory::new(vec![GridIndex::new(0, 0), GridIndex::new(1, 1)], &g).unwrap();
        assert_eq!(
            total_probability(&revisit, &target),
            total_probability(&once, &target)
        );
    }

    fn mc_config() -> ScenarioConfig {
        ScenarioConfig {
            grid: GridSpec::new(240.0, 30.0).unwrap(),
            gbs_list: vec![Gbs {
                position: Point3::new(120.0, 120.0, 10.0),
                transmit_power_dbm: 40.0,
            }],
            obstacles: vec![],
            mixture: vec![
                GmmComponent {
                    mean: Point2::new(90.0, 90.0),
                    sigma_m: 40.0,
                    weight: 0.6,
                },
                GmmComponent {
                    mean: Point2::new(180.0, 150.0),
                    sigma_m: 25.0,
                    weight: 0.4,
                },
            ],
            uav_altitude_m: 80.0,
            noise_power_dbm: -90.0,
            snr_threshold_db: 0.0,
            start: GridIndex::new(0, 0),
            finish: GridIndex::new(7, 7),
            budget: Budget::DistanceM(2000.0),
            channel: ChannelParams {
                intercept_los_db: 30.0,
                pathloss_exponent_los: 2.2,
                intercept_nlos_db: 40.0,
                pathloss_exponent_nlos: 3.3,
            },
            rng_seed: 11,
            floor_epsilon: 1e-12,
        }
    }

    #[test]
    fn monte_carlo_brackets_analytic_probability() {
        let config = mc_config();
        let snr = crate::radio::build_snr_map(&config).unwrap();
        let blocked = obstacle_mask(&config.grid, &config.obstacles);
        let target = crate::targetmap::build_target_map(&config, &blocked).unwrap();
        let g = PlanGraph::build(
            &snr,
            &target,
            config.snr_threshold_db,
            &config.grid,
            config.start,
            config.finish,
        )
        .unwrap();
        let t = dijkstra(&g, config.start, config.finish, EdgeWeight::InverseProb).unwrap();
        let report = monte_carlo_validate(&t, &config, 100_000, 5).unwrap();
        assert!(
            report.analytic_inside_ci(),
            "analytic {} outside CI [{}, {}]",
            report.analytic,
            report.ci_low,
            report.ci_high
        );
        assert!((report.analytic - report.empirical).abs() < 0.02);
    }

    #[test]
    fn monte_carlo_full_coverage_rate_is_one() {
        let config = mc_config();
        let snr = crate::radio::build_snr_map(&config).unwrap();
        let blocked = obstacle_mask(&config.grid, &config.obstacles);
        let target = crate::targetmap::build_target_map(&config, &blocked).unwrap();
        let g = PlanGraph::build(
            &snr,
            &target,
            config.snr_threshold_db,
            &config.grid,
            config.start,
            config.finish,
        )
        .unwrap();
        // boustrophedon sweep over the whole 8x8 grid
        let mut wps = Vec::new();
        for i in 0..8 {
            let col: Vec<usize> = if i % 2 == 0 {
                (0..8).collect()
            } else {
                (0..8).rev().collect()
            };
            for j in col {
                wps.push(GridIndex::new(i, j));
            }
        }
        let t = Trajectory::new(wps, &g).unwrap();
        let report = monte_carlo_validate(&t, &config, 2000, 6).unwrap();
        assert_eq!(report.empirical, 1.0);
        assert!((report.analytic - 1.0).abs() < 1e-9);
        assert!(report.analytic_inside_ci());
    }

    #[test]
    fn bruteforce_csp_on_2x2_enumerates_five_paths() {
        let g = grid_graph(2, &[], (0, 0), (1, 1));
        let r = brute_force_csp(&g, 1e9).unwrap().unwrap();
        assert_eq!(r.paths_enumerated, 5);
        // uniform probabilities: minimum f^P is the 2-waypoint diagonal
        let uniform_inv = 4.0;
        assert!((r.optimum_value - 2.0 * uniform_inv).abs() < 1e-9);
    }

    #[test]
    fn bruteforce_csp_budget_prunes_to_no_path() {
        let g = grid_graph(3, &[], (0, 0), (2, 2));
        assert!(brute_force_csp(&g, 30.0).unwrap().is_none());
    }

    #[test]
    fn bruteforce_csp_uniform_prefers_min_hop() {
        let g = grid_graph(3, &[], (0, 0), (2, 2));
        let r = brute_force_csp(&g, 1e9).unwrap().unwrap();
        assert_eq!(r.optimum_path.len(), 3); // two diagonal steps
    }

    #[test]
    fn bruteforce_guards_apply() {
        let g = grid_graph(5, &[], (0, 0), (4, 4)); // 25 vertices
        assert!(matches!(
            brute_force_csp(&g, 1e9),
            Err(EvalError::TooLarge { guard: 20, .. })
        ));
        assert!(matches!(
            brute_force_max_prob(&g, 1e9),
            Err(EvalError::TooLarge { guard: 16, .. })
        ));
    }

    #[test]
    fn bruteforce_max_prob_huge_budget_hits_total_mass() {
        let dim = 3;
        let probs = vec![1.0 / 9.0; 9];
        let g = graph_with_probs(dim, &probs, &[], (0, 0), (2, 2));
        let r = brute_force_max_prob(&g, 1e9).unwrap().unwrap();
        // a Hamiltonian path exists on the full 3x3 king graph
        assert!((r.optimum_value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn bruteforce_max_prob_tight_budget_restricts_to_min_distance_paths() {
        let dim = 3;
        let mut probs = vec![0.05; 9];
        probs[dim + 1] = 0.6; // center cell (1,1) rich
        let g = graph_with_probs(dim, &probs, &[], (0, 0), (2, 2));
        let shortest = 2.0 * 30.0 * std::f64::consts::SQRT_2;
        let r = brute_force_max_prob(&g, shortest).unwrap().unwrap();
        // only the two-diagonal path family fits; it passes the center
        assert!((r.optimum_path.f_d() - shortest).abs() < 1e-9);
        assert!((r.optimum_value - (0.05 + 0.6 + 0.05)).abs() < 1e-12);
    }

    #[test]
    fn verify_constraints_catches_each_violation() {
        let g = grid_graph(4, &[(2, 1)], (0, 0), (3, 3));
        let good = dijkstra(&g, GridIndex::new(0, 0), GridIndex::new(3, 3), EdgeWeight::Distance)
            .unwrap();
        assert!(verify_constraints(&good, &g, 1e9).is_ok());
        assert!(matches!(
            verify_constraints(&good, &g, good.f_d() - 1.0),
            Err(ConstraintViolation::OverBudget { .. })
        ));
        let wrong_start =
            dijkstra(&g, GridIndex::new(0, 1), GridIndex::new(3, 3), EdgeWeight::Distance)
                .unwrap();
        assert!(matches!(
            verify_constraints(&wrong_start, &g, 1e9),
            Err(ConstraintViolation::WrongStart { .. })
        ));
    }

    #[test]
    fn sweep_rows_are_deterministic_and_feasible() {
        let dim = 6;
        let mut probs = vec![0.01; dim * dim];
        probs[4 * dim + 1] = 0.3;
        probs[dim + 4] = 0.34;
        let g = graph_with_probs(dim, &probs, &[(3, 3)], (0, 0), (5, 5));
        let dbars = [260.0, 400.0, 700.0];
        let params = SweepParams {
            seed: 9,
            ..SweepParams::default()
        };
        let a = sweep(&g, &dbars, &params).unwrap();
        let b = sweep(&g, &dbars, &params).unwrap();
        assert_eq!(a.rows.len(), b.rows.len());
        for (x, y) in a.rows.iter().zip(&b.rows) {
            assert_eq!(x.total_prob.to_bits(), y.total_prob.to_bits());
            assert_eq!(x.f_d_m.to_bits(), y.f_d_m.to_bits());
        }
        // benchmark rows constant across budgets
        let bench: Vec<&SweepRow> = a
            .rows
            .iter()
            .filter(|r| r.solver == SolverTag::Benchmark)
            .collect();
        assert!(bench.windows(2).all(|w| w[0].total_prob == w[1].total_prob));
        // feasible rows respect their budget
        for r in &a.rows {
            assert!(r.feasible);
            assert!(r.f_d_m <= r.dbar_m + 1e-9);
        }
    }

    #[test]
    fn sweep_records_infeasible_budgets() {
        let g = grid_graph(4, &[], (0, 0), (3, 3));
        let params = SweepParams::default();
        let res = sweep(&g, &[30.0], &params).unwrap();
        assert!(!res.rows.is_empty());
        for r in &res.rows {
            assert!(!r.feasible);
            assert!(r.total_prob.is_nan());
        }
        let csv = res.to_csv();
        assert!(csv.lines().skip(1).all(|l| l.contains(",nan,")));
    }

    #[test]
    fn monte_carlo_zero_probability_region_rate_near_zero() {
        let config = mc_config();
        let snr = crate::radio::build_snr_map(&config).unwrap();
        let blocked = obstacle_mask(&config.grid, &config.obstacles);
        let target = crate::targetmap::build_target_map(&config, &blocked).unwrap();
        let g = PlanGraph::build(
            &snr,
            &target,
            config.snr_threshold_db,
            &config.grid,
            config.start,
            config.finish,
        )
        .unwrap();
        // far corner away from both mixture components
        let t = Trajectory::new(
            vec![GridIndex::new(0, 7), GridIndex::new(1, 7), GridIndex::new(2, 7)],
            &g,
        )
        .unwrap();
        let report = monte_carlo_validate(&t, &config, 20_000, 9).unwrap();
        assert!(report.analytic < 1e-3);
        assert!(report.empirical < 1e-2);
        assert!(report.analytic_inside_ci());
    }

    /// No solver output may beat the exhaustive optimum, and solution I may
    /// never undercut the constrained-shortest-path oracle.
    #[test]
    fn oracle_dominance_on_small_instances() {
        use crate::solvers::{
            improve_multi_waypoint, improve_single_detour, solve_lagrangian, AcoParams,
            LagrangianParams,
        };
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31337);
        for case in 0..25 {
            let dim = 4;
            let n = dim * dim;
            let mut probs: Vec<f64> = (0..n).map(|_| rng.random::<f64>()).collect();
            let total: f64 = probs.iter().sum();
            probs.iter_mut().for_each(|p| *p /= total);
            let mut infeasible = Vec::new();
            for i in 0..dim {
                for j in 0..dim {
                    let corner = (i, j) == (0, 0) || (i, j) == (dim - 1, dim - 1);
                    if !corner && rng.random::<f64>() < 0.2 {
                        infeasible.push((i, j));
                    }
                }
            }
            let g = graph_with_probs(dim, &probs, &infeasible, (0, 0), (dim - 1, dim - 1));
            let shortest = match check_feasibility(&g, f64::INFINITY) {
                Feasibility::Feasible(t) => t.f_d(),
                _ => continue, // disconnected mask; skip
            };
            let dbar = shortest * (1.0 + rng.random::<f64>());

            let csp = brute_force_csp(&g, dbar).unwrap().unwrap();
            let max_prob = brute_force_max_prob(&g, dbar).unwrap().unwrap();

            let sol1 = solve_lagrangian(&g, dbar, &LagrangianParams::default()).unwrap();
            assert!(
                sol1.trajectory.f_p() >= csp.optimum_value - 1e-9,
                "case {case}: solution I f^P beat the CSP oracle"
            );

            let sol2 = improve_single_detour(&g, &sol1.trajectory, 6, dbar);
            let aco = AcoParams {
                rng_seed: case,
                ..AcoParams::default()
            };
            let sol3 = improve_multi_waypoint(&g, &sol1.trajectory, 6, dbar, &aco);
            for (name, t) in [
                ("sol1", &sol1.trajectory),
                ("sol2", &sol2.trajectory),
                ("sol3", &sol3.trajectory),
            ] {
                assert!(
                    t.total_prob() <= max_prob.optimum_value + 1e-9,
                    "case {case}: {name} exceeded the max-probability oracle"
                );
            }
        }
    }

    #[test]
    fn sol2_budget_monotone_for_fixed_initial() {
        let dim = 6;
        let mut probs = vec![0.005; dim * dim];
        probs[2 * dim + 5] = 0.4;
        probs[5 * dim] = 0.3;
        let g = graph_with_probs(dim, &probs, &[], (0, 0), (5, 5));
        let bench = benchmark_shortest(&g, 1e9).unwrap().trajectory;
        let mut last = -1.0;
        for slack in [0.0, 30.0, 90.0, 180.0, 400.0, 900.0] {
            let r = improve_single_detour(&g, &bench, 10, bench.f_d() + slack);
            assert!(r.trajectory.total_prob() >= last);
            last = r.trajectory.total_prob();
        }
    }
}
