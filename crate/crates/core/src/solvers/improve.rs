//! Improvement passes over an initial feasible trajectory.
//!
//! Both solvers pick candidate cells from the feasible vertices not already
//! on the initial trajectory, sorted by sensing probability (descending,
//! ties by ascending index). Stitched paths may revisit cells; the objective
//! counts each distinct cell once, and solution III runs a loop-shortcutting
//! pass that drops cycles whose removal loses no probability.

use std::time::Instant;

use crate::graph::{dijkstra, EdgeWeight, PlanGraph, Trajectory};
use crate::scenario::GridIndex;

use super::aco::{aco_path_tsp, AcoParams};
use super::{report, SolverReport, SolverTag};

/// Feasible vertices absent from the trajectory, most probable first.
fn ranked_candidates(g: &PlanGraph, initial: &Trajectory, limit: usize) -> Vec<usize> {
    let mut on_path = vec![false; g.grid().cell_count()];
    for w in initial.waypoints() {
        on_path[g.linear(*w)] = true;
    }
    let mut cands: Vec<usize> = g.vertices().filter(|v| !on_path[*v]).collect();
    cands.sort_by(|a, b| g.prob(*b).total_cmp(&g.prob(*a)).then(a.cmp(b)));
    cands.truncate(limit);
    cands
}

/// Solution II: for each of the top `r_i` candidate cells, leave the initial
/// trajectory at the waypoint nearest the candidate, fly to it, then fly to
/// the finish, both legs as shortest-distance paths. Keeps the
/// highest-probability variant that fits the budget, so the result never
/// falls below the initial trajectory.
pub fn improve_single_detour(
    g: &PlanGraph,
    initial: &Trajectory,
    r_i: usize,
    dbar_m: f64,
) -> SolverReport {
    let t0 = Instant::now();
    let finish = g.finish();
    let mut best = initial.clone();

    for cand in ranked_candidates(g, initial, r_i) {
        let cand_idx = g.index_of(cand);
        let cand_center = g.grid().center(cand_idx).expect("vertex in bounds");

        // nearest waypoint of the initial trajectory, earliest position on ties
        let mut at = 0usize;
        let mut at_dist = f64::INFINITY;
        for (n, w) in initial.waypoints().iter().enumerate() {
            let d = g
                .grid()
                .center(*w)
                .expect("waypoint in bounds")
                .distance_to(cand_center);
            if d < at_dist {
                at_dist = d;
                at = n;
            }
        }

        let Some(leg_out) = dijkstra(g, initial.waypoints()[at], cand_idx, EdgeWeight::Distance)
        else {
            continue; // f^D(I_r) = ∞
        };
        let Some(leg_back) = dijkstra(g, cand_idx, finish, EdgeWeight::Distance) else {
            continue;
        };

        let mut wps: Vec<GridIndex> = initial.waypoints()[..=at].to_vec();
        wps.extend_from_slice(&leg_out.waypoints()[1..]);
        wps.extend_from_slice(&leg_back.waypoints()[1..]);
        let t = Trajectory::new(wps, g).expect("stitched path is structurally valid");
        if t.f_d() <= dbar_m && t.total_prob() > best.total_prob() {
            best = t;
        }
    }
    report(SolverTag::Sol2, best, None, t0)
}

/// Solution III: tour the initial waypoints plus the top `r_ii` candidate
/// cells with a fixed-endpoint path TSP over the metric closure, expanding
/// the tour through stored shortest paths. When the expansion misses the
/// budget or some closure entry is unreachable, retries with one fewer
/// candidate; with zero candidates left it falls back to the initial
/// trajectory, so the result never falls below it.
pub fn improve_multi_waypoint(
    g: &PlanGraph,
    initial: &Trajectory,
    r_ii: usize,
    dbar_m: f64,
    aco: &AcoParams,
) -> SolverReport {
    let t0 = Instant::now();
    let extras = ranked_candidates(g, initial, r_ii);

    // distinct initial waypoints in first-visit order
    let mut base: Vec<usize> = Vec::new();
    for w in initial.waypoints() {
        let v = g.linear(*w);
        if !base.contains(&v) {
            base.push(v);
        }
    }

    for r in (0..=extras.len()).rev() {
        let mut set = base.clone();
        set.extend_from_slice(&extras[..r]);
        if set.len() == 1 {
            // start == finish with no extras
            return report(SolverTag::Sol3, initial.clone(), None, t0);
        }
        // a walk through W distinct cells takes at least (W-1) steps of Δ,
        // so budgets below that cannot admit this waypoint count
        if (set.len() as f64 - 1.0) * g.delta() > dbar_m {
            continue;
        }

        let Some((dist, paths)) = metric_closure(g, &set) else {
            continue;
        };
        let first = 0; // start is the first distinct initial waypoint
        let last = set
            .iter()
            .position(|v| *v == g.linear(g.finish()))
            .expect("finish is on the initial trajectory");
        let Some(tour) = aco_path_tsp(&dist, first, last, aco) else {
            continue;
        };

        let mut wps: Vec<GridIndex> = vec![g.index_of(set[tour[0]])];
        for e in tour.windows(2) {
            let leg = paths[e[0]][e[1]].as_ref().expect("tour uses finite entries");
            wps.extend(leg[1..].iter().map(|v| g.index_of(*v)));
        }
        let wps = shortcut_loops(wps, g);
        let t = Trajectory::new(wps, g).expect("expanded tour is structurally valid");
        if t.f_d() <= dbar_m {
            return report(SolverTag::Sol3, t, None, t0);
        }
    }
    report(SolverTag::Sol3, initial.clone(), None, t0)
}

type ClosurePaths = Vec<Vec<Option<Vec<usize>>>>;

/// All-pairs shortest distances and paths among `set`, built from one
/// single-source search per element; `None` when some pair is disconnected.
fn metric_closure(g: &PlanGraph, set: &[usize]) -> Option<(Vec<Vec<f64>>, ClosurePaths)> {
    let w = set.len();
    let mut dist = vec![vec![f64::INFINITY; w]; w];
    let mut paths: ClosurePaths = vec![vec![None; w]; w];
    for a in 0..w {
        dist[a][a] = 0.0;
        let (d, prev) = crate::graph::dijkstra_tree(g, set[a], EdgeWeight::Distance);
        for b in 0..w {
            if a == b {
                continue;
            }
            if !d[set[b]].is_finite() {
                return None;
            }
            dist[a][b] = d[set[b]];
            let mut path = vec![set[b]];
            let mut v = set[b];
            while v != set[a] {
                v = prev[v];
                path.push(v);
            }
            path.reverse();
            paths[a][b] = Some(path);
        }
    }
    Some((dist, paths))
}

/// Removes cycles (`wps[a] == wps[b]`, drop `a+1..=b`) whenever the distinct-
/// cell probability is preserved. Probability sums are accumulated in
/// canonical cell order, so equal visited sets compare exactly equal.
fn shortcut_loops(mut wps: Vec<GridIndex>, g: &PlanGraph) -> Vec<GridIndex> {
    let set_prob = |wps: &[GridIndex]| -> f64 {
        let mut seen = vec![false; g.grid().cell_count()];
        for w in wps {
            seen[g.linear(*w)] = true;
        }
        seen.iter()
            .enumerate()
            .filter(|(_, s)| **s)
            .map(|(v, _)| g.prob(v))
            .sum()
    };
    'outer: loop {
        let current = set_prob(&wps);
        for a in 0..wps.len() {
            for b in a + 1..wps.len() {
                if wps[b] != wps[a] {
                    continue;
                }
                let mut trial = wps[..=a].to_vec();
                trial.extend_from_slice(&wps[b + 1..]);
                if set_prob(&trial) >= current {
                    wps = trial;
                    continue 'outer;
                }
            }
        }
        break;
    }
    wps
}
