//! Dual-weighted undirected graph over SNR-feasible grid points.
//!
//! Vertices are the cells whose expected SNR meets the threshold; edges join
//! 8-neighbors (center distance ≤ √2·Δ). Every edge carries a distance
//! weight (Δ or √2·Δ) and a probability weight equal to the inverse sensing
//! probability of the entered vertex, which makes the inverse-probability
//! path cost vertex-additive: a path's cost is the source term plus one term
//! per entered vertex.
//!
//! All queries break ties lexicographically on (weight, vertex index), so
//! outputs are reproducible.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::radio::SnrMap;
use crate::scenario::{GridIndex, GridSpec, ScenarioError};
use crate::targetmap::TargetMap;

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Neighbor offsets in fixed scan order; determinism depends on this order.
const NEIGHBOR_OFFSETS: [(i64, i64); 8] = [
    (-1, -1),
    (-1, 0),
    (-1, 1),
    (0, -1),
    (0, 1),
    (1, -1),
    (1, 0),
    (1, 1),
];

/// Graph over feasible grid points with both edge weights, plus the per-cell
/// probabilities it was built from. Immutable after construction; queries are
/// read-only.
#[derive(Debug, Clone)]
pub struct PlanGraph {
    grid: GridSpec,
    feasible: Vec<bool>,
    prob: Vec<f64>,
    inv_prob: Vec<f64>,
    start: usize,
    finish: usize,
}

impl PlanGraph {
    /// Builds the graph; errors if an endpoint fails the SNR threshold.
    pub fn build(
        snr: &SnrMap,
        target: &TargetMap,
        snr_threshold_db: f64,
        grid: &GridSpec,
        start: GridIndex,
        finish: GridIndex,
    ) -> Result<Self, GraphError> {
        let d = grid.dimension();
        if snr.dimension() != d || target.dimension() != d {
            return Err(GraphError::DimensionMismatch);
        }
        for (name, idx) in [("start", start), ("finish", finish)] {
            if !grid.in_bounds(idx) {
                return Err(GraphError::Scenario(ScenarioError::OutOfBounds {
                    index: idx,
                    dimension: d,
                }));
            }
            let _ = name;
        }
        let threshold_linear = 10f64.powf(snr_threshold_db / 10.0);
        let mut feasible = vec![false; d * d];
        let mut prob = vec![0.0; d * d];
        let mut inv_prob = vec![0.0; d * d];
        for idx in grid.cells() {
            let v = grid.linear(idx);
            feasible[v] = snr.get(idx.i, idx.j) >= threshold_linear;
            prob[v] = target.prob(idx.i, idx.j);
            inv_prob[v] = target.inverse_weight(idx.i, idx.j);
        }
        for (name, idx) in [("start", start), ("finish", finish)] {
            if !feasible[grid.linear(idx)] {
                return Err(GraphError::InfeasibleEndpoint {
                    endpoint: name,
                    index: idx,
                });
            }
        }
        Ok(Self {
            grid: *grid,
            feasible,
            prob,
            inv_prob,
            start: grid.linear(start),
            finish: grid.linear(finish),
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn dimension(&self) -> usize {
        self.grid.dimension()
    }

    pub fn delta(&self) -> f64 {
        self.grid.granularity_m()
    }

    pub fn start(&self) -> GridIndex {
        self.grid.from_linear(self.start)
    }

    pub fn finish(&self) -> GridIndex {
        self.grid.from_linear(self.finish)
    }

    pub fn contains(&self, idx: GridIndex) -> bool {
        self.grid.in_bounds(idx) && self.feasible[self.grid.linear(idx)]
    }

    pub fn vertex_count(&self) -> usize {
        self.feasible.iter().filter(|f| **f).count()
    }

    /// Feasible vertices in row-major order (linear indices).
    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.feasible
            .iter()
            .enumerate()
            .filter_map(|(v, f)| f.then_some(v))
    }

    pub fn linear(&self, idx: GridIndex) -> usize {
        self.grid.linear(idx)
    }

    pub fn index_of(&self, v: usize) -> GridIndex {
        self.grid.from_linear(v)
    }

    /// Stored sensing probability of a vertex.
    pub fn prob(&self, v: usize) -> f64 {
        self.prob[v]
    }

    /// Inverse-probability weight of a vertex (the W^P of any edge entering it).
    pub fn inverse_weight(&self, v: usize) -> f64 {
        self.inv_prob[v]
    }

    /// Feasible neighbors of `v` in fixed scan order.
    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let d = self.grid.dimension() as i64;
        let i = (v / self.grid.dimension()) as i64;
        let j = (v % self.grid.dimension()) as i64;
        NEIGHBOR_OFFSETS.iter().filter_map(move |&(di, dj)| {
            let (ni, nj) = (i + di, j + dj);
            if ni < 0 || nj < 0 || ni >= d || nj >= d {
                return None;
            }
            let n = (ni * d + nj) as usize;
            self.feasible[n].then_some(n)
        })
    }

    /// Center distance of an edge between adjacent vertices: Δ or √2·Δ.
    pub fn edge_distance(&self, u: usize, v: usize) -> f64 {
        let d = self.grid.dimension();
        let (ui, uj) = (u / d, u % d);
        let (vi, vj) = (v / d, v % d);
        debug_assert!(
            ui.abs_diff(vi) <= 1 && uj.abs_diff(vj) <= 1 && u != v,
            "not an edge: {u} {v}"
        );
        if ui != vi && uj != vj {
            SQRT_2 * self.delta()
        } else {
            self.delta()
        }
    }
}

/// Edge weight selector for path queries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EdgeWeight {
    /// W^D: center distance.
    Distance,
    /// W^P: inverse sensing probability of the entered vertex, plus a fixed
    /// source term that never affects the argmin.
    InverseProb,
    /// W^P + λ·W^D.
    Aggregated(f64),
}

impl EdgeWeight {
    fn edge_cost(&self, g: &PlanGraph, u: usize, v: usize) -> f64 {
        match *self {
            EdgeWeight::Distance => g.edge_distance(u, v),
            EdgeWeight::InverseProb => g.inverse_weight(v),
            EdgeWeight::Aggregated(lambda) => {
                g.inverse_weight(v) + lambda * g.edge_distance(u, v)
            }
        }
    }

    fn source_term(&self, g: &PlanGraph, src: usize) -> f64 {
        match *self {
            EdgeWeight::Distance => 0.0,
            EdgeWeight::InverseProb | EdgeWeight::Aggregated(_) => g.inverse_weight(src),
        }
    }
}

/// Ordered waypoint sequence with cached path functionals.
///
/// Structural invariants (checked at construction): non-empty, every
/// waypoint feasible, consecutive waypoints adjacent. Endpoint agreement
/// with the graph's start/finish is a solver-level constraint checked by
/// the evaluation module.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    waypoints: Vec<GridIndex>,
    f_d: f64,
    f_p: f64,
    total_prob: f64,
}

impl Trajectory {
    pub fn new(waypoints: Vec<GridIndex>, g: &PlanGraph) -> Result<Self, GraphError> {
        if waypoints.is_empty() {
            return Err(GraphError::EmptyTrajectory);
        }
        for (n, w) in waypoints.iter().enumerate() {
            if !g.contains(*w) {
                return Err(GraphError::InfeasibleWaypoint { position: n, index: *w });
            }
        }
        for (n, pair) in waypoints.windows(2).enumerate() {
            let (a, b) = (pair[0], pair[1]);
            let adjacent = a != b && a.i.abs_diff(b.i) <= 1 && a.j.abs_diff(b.j) <= 1;
            if !adjacent {
                return Err(GraphError::NonAdjacentStep {
                    position: n,
                    from: a,
                    to: b,
                });
            }
        }
        let f_d = path_distance(&waypoints, g.grid());
        let f_p: f64 = waypoints.iter().map(|w| g.inverse_weight(g.linear(*w))).sum();
        let total_prob = distinct_probability(&waypoints, g.grid(), |v| g.prob(v));
        Ok(Self {
            waypoints,
            f_d,
            f_p,
            total_prob,
        })
    }

    pub fn waypoints(&self) -> &[GridIndex] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    pub fn first(&self) -> GridIndex {
        self.waypoints[0]
    }

    pub fn last(&self) -> GridIndex {
        *self.waypoints.last().expect("non-empty")
    }

    /// Sum flying distance, meters.
    pub fn f_d(&self) -> f64 {
        self.f_d
    }

    /// Sum inverse sensing probability (first waypoint plus every entered one).
    pub fn f_p(&self) -> f64 {
        self.f_p
    }

    /// Total sensing probability over distinct visited cells.
    pub fn total_prob(&self) -> f64 {
        self.total_prob
    }
}

/// Sum of per-segment center distances; every segment is Δ or √2·Δ.
pub fn path_distance(waypoints: &[GridIndex], grid: &GridSpec) -> f64 {
    let delta = grid.granularity_m();
    waypoints
        .windows(2)
        .map(|pair| {
            if pair[0].i != pair[1].i && pair[0].j != pair[1].j {
                SQRT_2 * delta
            } else {
                delta
            }
        })
        .sum()
}

/// Inverse-probability cost: first waypoint's inverse weight plus the
/// inverse weight of every subsequently entered waypoint.
pub fn path_inverse_prob(waypoints: &[GridIndex], target: &TargetMap) -> f64 {
    waypoints
        .iter()
        .map(|w| target.inverse_weight(w.i, w.j))
        .sum()
}

/// Probability mass over the set of distinct visited cells.
pub(crate) fn distinct_probability(
    waypoints: &[GridIndex],
    grid: &GridSpec,
    prob_of: impl Fn(usize) -> f64,
) -> f64 {
    let mut seen = vec![false; grid.cell_count()];
    let mut acc = 0.0;
    for w in waypoints {
        let v = grid.linear(*w);
        if !seen[v] {
            seen[v] = true;
            acc += prob_of(v);
        }
    }
    acc
}

/// Min-heap entry ordered by (cost, vertex); ties go to the lower vertex
/// index, which is lexicographic on (i, j).
#[derive(Debug, Clone, Copy, PartialEq)]
struct MinScored(f64, usize);

impl Eq for MinScored {}

impl Ord for MinScored {
    fn cmp(&self, other: &Self) -> Ordering {
        // reversed for BinaryHeap's max-heap semantics
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for MinScored {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Dijkstra with optional vertex/edge bans; returns edge-cost total
/// (without the source term) and the vertex sequence.
fn dijkstra_raw(
    g: &PlanGraph,
    src: usize,
    dst: usize,
    weight: EdgeWeight,
    banned_vertex: Option<&[bool]>,
    banned_edges: &[(usize, usize)],
) -> Option<(f64, Vec<usize>)> {
    let n = g.grid().cell_count();
    let is_banned = |v: usize| banned_vertex.is_some_and(|b| b[v]);
    if !g.feasible[src] || !g.feasible[dst] || is_banned(src) || is_banned(dst) {
        return None;
    }
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    dist[src] = 0.0;
    heap.push(MinScored(0.0, src));
    while let Some(MinScored(cost, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        if v == dst {
            break;
        }
        for w in g.neighbors(v) {
            if done[w] || is_banned(w) || banned_edges.contains(&(v, w)) {
                continue;
            }
            let next = cost + weight.edge_cost(g, v, w);
            if next < dist[w] {
                dist[w] = next;
                prev[w] = v;
                heap.push(MinScored(next, w));
            }
        }
    }
    if !dist[dst].is_finite() {
        return None;
    }
    let mut path = vec![dst];
    let mut v = dst;
    while v != src {
        v = prev[v];
        path.push(v);
    }
    path.reverse();
    Some((dist[dst], path))
}

fn to_trajectory(g: &PlanGraph, path: Vec<usize>) -> Trajectory {
    let waypoints = path.into_iter().map(|v| g.index_of(v)).collect();
    Trajectory::new(waypoints, g).expect("search paths are structurally valid")
}

/// Full single-source Dijkstra; returns per-vertex cost and predecessor
/// (`usize::MAX` for unreached). Relaxation order matches the targeted
/// search, so extracted paths are identical to per-pair queries.
pub(crate) fn dijkstra_tree(g: &PlanGraph, src: usize, weight: EdgeWeight) -> (Vec<f64>, Vec<usize>) {
    let n = g.grid().cell_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut done = vec![false; n];
    let mut heap = BinaryHeap::new();
    if g.feasible[src] {
        dist[src] = 0.0;
        heap.push(MinScored(0.0, src));
    }
    while let Some(MinScored(cost, v)) = heap.pop() {
        if done[v] {
            continue;
        }
        done[v] = true;
        for w in g.neighbors(v) {
            if done[w] {
                continue;
            }
            let next = cost + weight.edge_cost(g, v, w);
            if next < dist[w] {
                dist[w] = next;
                prev[w] = v;
                heap.push(MinScored(next, w));
            }
        }
    }
    (dist, prev)
}

/// Minimum-weight path between two vertices, or `None` when disconnected
/// or an endpoint is infeasible.
pub fn dijkstra(
    g: &PlanGraph,
    src: GridIndex,
    dst: GridIndex,
    weight: EdgeWeight,
) -> Option<Trajectory> {
    if !g.grid().in_bounds(src) || !g.grid().in_bounds(dst) {
        return None;
    }
    dijkstra_raw(g, g.linear(src), g.linear(dst), weight, None, &[])
        .map(|(_, path)| to_trajectory(g, path))
}

/// Total path cost under a weight: source term plus per-edge costs.
pub fn path_cost(g: &PlanGraph, waypoints: &[GridIndex], weight: EdgeWeight) -> f64 {
    let mut acc = weight.source_term(g, g.linear(waypoints[0]));
    for pair in waypoints.windows(2) {
        acc += weight.edge_cost(g, g.linear(pair[0]), g.linear(pair[1]));
    }
    acc
}

#[derive(Debug, Clone, PartialEq)]
struct CandidatePath {
    cost: f64,
    path: Vec<usize>,
}

impl Eq for CandidatePath {}

impl Ord for CandidatePath {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cost
            .total_cmp(&other.cost)
            .then_with(|| self.path.cmp(&other.path))
    }
}

impl PartialOrd for CandidatePath {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Yen's K shortest loopless paths under the given weight.
///
/// Returns up to `k` pairwise-distinct simple paths in non-decreasing cost
/// order; the first is the Dijkstra path. Fewer are returned when the graph
/// has fewer simple paths.
pub fn yen_k_shortest(
    g: &PlanGraph,
    src: GridIndex,
    dst: GridIndex,
    weight: EdgeWeight,
    k: usize,
) -> Vec<Trajectory> {
    if k == 0 || !g.grid().in_bounds(src) || !g.grid().in_bounds(dst) {
        return Vec::new();
    }
    let (src, dst) = (g.linear(src), g.linear(dst));
    let n = g.grid().cell_count();

    let mut accepted: Vec<CandidatePath> = Vec::new();
    let mut candidates: std::collections::BTreeSet<CandidatePath> = std::collections::BTreeSet::new();

    let Some((cost, path)) = dijkstra_raw(g, src, dst, weight, None, &[]) else {
        return Vec::new();
    };
    accepted.push(CandidatePath {
        cost: cost + weight.source_term(g, src),
        path,
    });

    while accepted.len() < k {
        let last = accepted.last().expect("non-empty").path.clone();
        for spur_pos in 0..last.len() - 1 {
            let root = &last[..=spur_pos];
            let spur = last[spur_pos];

            // ban the next edge of every known path sharing this root
            let mut banned_edges: Vec<(usize, usize)> = Vec::new();
            for a in &accepted {
                if a.path.len() > spur_pos + 1 && a.path[..=spur_pos] == *root {
                    let e = (a.path[spur_pos], a.path[spur_pos + 1]);
                    if !banned_edges.contains(&e) {
                        banned_edges.push(e);
                    }
                }
            }
            // ban root vertices except the spur so paths stay loopless
            let mut banned_vertex = vec![false; n];
            for &v in &root[..spur_pos] {
                banned_vertex[v] = true;
            }

            if let Some((spur_cost, spur_path)) =
                dijkstra_raw(g, spur, dst, weight, Some(&banned_vertex), &banned_edges)
            {
                let mut full = root[..spur_pos].to_vec();
                full.extend_from_slice(&spur_path);
                let mut cost = weight.source_term(g, src) + spur_cost;
                for pair in root.windows(2) {
                    cost += weight.edge_cost(g, pair[0], pair[1]);
                }
                let cand = CandidatePath { cost, path: full };
                if !accepted.iter().any(|a| a.path == cand.path) {
                    candidates.insert(cand);
                }
            }
        }
        match candidates.pop_first() {
            Some(best) => accepted.push(best),
            None => break,
        }
    }

    accepted
        .into_iter()
        .map(|c| to_trajectory(g, c.path))
        .collect()
}

/// Feasibility of the instance under a distance budget.
#[derive(Debug, Clone)]
pub enum Feasibility {
    /// The shortest start→finish distance fits the budget.
    Feasible(Trajectory),
    /// A path exists but even the shortest exceeds the budget.
    BudgetExceeded { shortest: Trajectory },
    /// Start and finish are not connected in the feasible subgraph.
    Disconnected,
}

/// Shortest-distance feasibility check; the budget boundary is inclusive.
pub fn check_feasibility(g: &PlanGraph, dbar_m: f64) -> Feasibility {
    match dijkstra(g, g.start(), g.finish(), EdgeWeight::Distance) {
        None => Feasibility::Disconnected,
        Some(t) => {
            if t.f_d() <= dbar_m {
                Feasibility::Feasible(t)
            } else {
                Feasibility::BudgetExceeded { shortest: t }
            }
        }
    }
}

/// Serialized trajectory exchange document: 1-based waypoints plus derived
/// metrics. `solver`, `seed` and `dual_bound` are present when known.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TrajectoryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub f_d_m: f64,
    pub f_p: f64,
    pub total_prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_bound: Option<f64>,
    pub waypoints: Vec<[usize; 2]>,
}

impl TrajectoryDoc {
    pub fn from_trajectory(t: &Trajectory, solver: Option<String>, seed: Option<u64>, dual_bound: Option<f64>) -> Self {
        Self {
            solver,
            seed,
            f_d_m: t.f_d(),
            f_p: t.f_p(),
            total_prob: t.total_prob(),
            dual_bound,
            waypoints: t
                .waypoints()
                .iter()
                .map(|w| {
                    let (i, j) = w.one_based();
                    [i, j]
                })
                .collect(),
        }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("trajectory doc serialization cannot fail")
    }

    pub fn from_toml(text: &str) -> Result<Self, GraphError> {
        toml::from_str(text).map_err(|e| GraphError::Doc(e.to_string()))
    }

    /// Rebuilds a validated `Trajectory` over a graph; errors name the
    /// offending waypoint or segment.
    pub fn to_trajectory(&self, g: &PlanGraph) -> Result<Trajectory, GraphError> {
        let mut waypoints = Vec::with_capacity(self.waypoints.len());
        for w in &self.waypoints {
            waypoints.push(
                GridIndex::from_one_based(w[0], w[1]).map_err(GraphError::Scenario)?,
            );
        }
        Trajectory::new(waypoints, g)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GraphError {
    #[error("map dimensions disagree with the grid")]
    DimensionMismatch,
    #[error("{endpoint} {index} fails the expected SNR threshold")]
    InfeasibleEndpoint {
        endpoint: &'static str,
        index: GridIndex,
    },
    #[error("trajectory has no waypoints")]
    EmptyTrajectory,
    #[error("waypoint {position} at {index} is not a feasible vertex")]
    InfeasibleWaypoint { position: usize, index: GridIndex },
    #[error("segment {position}: step {from} -> {to} is not between adjacent grid points")]
    NonAdjacentStep {
        position: usize,
        from: GridIndex,
        to: GridIndex,
    },
    #[error("trajectory document error: {0}")]
    Doc(String),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}
