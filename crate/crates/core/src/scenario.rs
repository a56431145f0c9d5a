//! Problem-instance data model, scenario file I/O, and grid geometry.
//!
//! A scenario file is a TOML document with named sections (`grid`, `gbs`,
//! `obstacles`, `mixture`, `uav`, `channel`, `solver`) and fully determines
//! one experiment. Grid indices are 1-based in files, matching the usual
//! {1,…,D} convention, and 0-based internally.

use serde::{Deserialize, Serialize};

use crate::radio::ChannelParams;

/// A point in the horizontal plane, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn distance_to(&self, other: Point2) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// A point in 3D space, meters; `z` is height above ground.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn distance_to(&self, other: Point3) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        let dz = self.z - other.z;
        (dx * dx + dy * dy + dz * dz).sqrt()
    }
}

/// 0-based grid cell index. Cell `(i, j)` covers
/// `[iΔ, (i+1)Δ] × [jΔ, (j+1)Δ]` and is represented by its center.
///
/// Files and display use the 1-based form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GridIndex {
    pub i: usize,
    pub j: usize,
}

impl GridIndex {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Converts from the 1-based `(i, j)` used in files and the literature.
    pub fn from_one_based(i: usize, j: usize) -> Result<Self, ScenarioError> {
        if i == 0 || j == 0 {
            return Err(ScenarioError::invalid(
                "grid index",
                "1-based indices must be >= 1",
            ));
        }
        Ok(Self { i: i - 1, j: j - 1 })
    }

    pub fn one_based(&self) -> (usize, usize) {
        (self.i + 1, self.j + 1)
    }
}

impl std::fmt::Display for GridIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let (i, j) = self.one_based();
        write!(f, "({i},{j})")
    }
}

/// Square region quantized into D × D square cells of side `granularity_m`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    side_length_m: f64,
    granularity_m: f64,
    dimension: usize,
}

impl GridSpec {
    /// Builds a grid spec, rejecting non-integer `L / Δ` rather than rounding.
    pub fn new(side_length_m: f64, granularity_m: f64) -> Result<Self, ScenarioError> {
        if !side_length_m.is_finite() || side_length_m <= 0.0 {
            return Err(ScenarioError::invalid(
                "grid.side_length_m",
                "must be positive and finite",
            ));
        }
        if !granularity_m.is_finite() || granularity_m <= 0.0 {
            return Err(ScenarioError::invalid(
                "grid.granularity_m",
                "must be positive and finite",
            ));
        }
        let ratio = side_length_m / granularity_m;
        let dimension = ratio.round();
        if (ratio - dimension).abs() > 1e-9 * ratio.max(1.0) {
            return Err(ScenarioError::invalid(
                "grid.granularity_m",
                format!("side length {side_length_m} is not an integer multiple of granularity {granularity_m}"),
            ));
        }
        let dimension = dimension as usize;
        if dimension < 2 {
            return Err(ScenarioError::invalid(
                "grid",
                format!("grid dimension must be >= 2, got {dimension}"),
            ));
        }
        Ok(Self {
            side_length_m,
            granularity_m,
            dimension,
        })
    }

    pub fn side_length_m(&self) -> f64 {
        self.side_length_m
    }

    /// Cell side length Δ in meters.
    pub fn granularity_m(&self) -> f64 {
        self.granularity_m
    }

    /// Cells per side, D.
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn in_bounds(&self, idx: GridIndex) -> bool {
        idx.i < self.dimension && idx.j < self.dimension
    }

    /// Center of cell `idx`: `((i+0.5)Δ, (j+0.5)Δ)` with 0-based `i, j`.
    pub fn center(&self, idx: GridIndex) -> Result<Point2, ScenarioError> {
        if !self.in_bounds(idx) {
            return Err(ScenarioError::OutOfBounds {
                index: idx,
                dimension: self.dimension,
            });
        }
        let d = self.granularity_m;
        Ok(Point2::new(
            (idx.i as f64 + 0.5) * d,
            (idx.j as f64 + 0.5) * d,
        ))
    }

    /// Nearest grid center to an arbitrary point, ties broken toward the
    /// lower index, coordinates clamped into the region.
    pub fn snap(&self, p: Point2) -> GridIndex {
        let snap_axis = |v: f64| -> usize {
            let t = v / self.granularity_m - 0.5;
            // nearest integer with half-way ties toward the lower one
            let k = (t - 0.5).ceil();
            (k.max(0.0) as usize).min(self.dimension - 1)
        };
        GridIndex::new(snap_axis(p.x), snap_axis(p.y))
    }

    /// Linear index `i·D + j` for dense per-cell storage.
    pub fn linear(&self, idx: GridIndex) -> usize {
        idx.i * self.dimension + idx.j
    }

    pub fn from_linear(&self, v: usize) -> GridIndex {
        GridIndex::new(v / self.dimension, v % self.dimension)
    }

    pub fn cell_count(&self) -> usize {
        self.dimension * self.dimension
    }

    /// Iterates all cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = GridIndex> + '_ {
        let d = self.dimension;
        (0..d).flat_map(move |i| (0..d).map(move |j| GridIndex::new(i, j)))
    }
}

/// Ground base station.
#[derive(Debug, Clone, PartialEq)]
pub struct Gbs {
    /// Antenna location; `z` is height above ground, must be positive.
    pub position: Point3,
    /// Transmit power P in dBm.
    pub transmit_power_dbm: f64,
}

impl Gbs {
    pub fn transmit_power_mw(&self) -> f64 {
        10f64.powf(self.transmit_power_dbm / 10.0)
    }
}

/// Axis-aligned rectangular building extruded from the ground.
#[derive(Debug, Clone, PartialEq)]
pub struct Obstacle {
    pub x_min_m: f64,
    pub x_max_m: f64,
    pub y_min_m: f64,
    pub y_max_m: f64,
    pub height_m: f64,
}

impl Obstacle {
    /// True iff the footprint overlaps the rectangle with positive area.
    pub fn footprint_overlaps(&self, x_lo: f64, x_hi: f64, y_lo: f64, y_hi: f64) -> bool {
        self.x_min_m < x_hi && self.x_max_m > x_lo && self.y_min_m < y_hi && self.y_max_m > y_lo
    }
}

/// One isotropic 2D Gaussian component of the target location distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmComponent {
    pub mean: Point2,
    pub sigma_m: f64,
    pub weight: f64,
}

/// Flying-distance budget, either given directly or as speed × time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Budget {
    DistanceM(f64),
    SpeedTime { speed_mps: f64, max_time_s: f64 },
}

impl Budget {
    /// Budget in meters: D̄ directly, or V·T̄.
    pub fn distance_m(&self) -> f64 {
        match *self {
            Budget::DistanceM(d) => d,
            Budget::SpeedTime {
                speed_mps,
                max_time_s,
            } => speed_mps * max_time_s,
        }
    }
}

/// Full problem instance. Immutable after construction and safe to share.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub grid: GridSpec,
    pub gbs_list: Vec<Gbs>,
    pub obstacles: Vec<Obstacle>,
    pub mixture: Vec<GmmComponent>,
    /// UAV altitude H in meters.
    pub uav_altitude_m: f64,
    /// Effective noise power σ² at the UAV receiver, dBm.
    pub noise_power_dbm: f64,
    /// Minimum expected SNR threshold ρ̄, dB.
    pub snr_threshold_db: f64,
    pub start: GridIndex,
    pub finish: GridIndex,
    pub budget: Budget,
    pub channel: ChannelParams,
    pub rng_seed: u64,
    /// Substitute for exact-zero probabilities in inverse weights.
    pub floor_epsilon: f64,
}

impl ScenarioConfig {
    pub fn distance_budget_m(&self) -> f64 {
        self.budget.distance_m()
    }

    pub fn noise_power_mw(&self) -> f64 {
        10f64.powf(self.noise_power_dbm / 10.0)
    }

    /// Largest possible GBS-to-UAV 3D link distance in this scenario.
    pub fn max_link_distance_m(&self) -> f64 {
        let horiz = std::f64::consts::SQRT_2 * self.grid.side_length_m();
        let max_gbs_h = self
            .gbs_list
            .iter()
            .map(|g| g.position.z)
            .fold(0.0, f64::max);
        horiz.hypot(self.uav_altitude_m + max_gbs_h)
    }

    /// Checks every invariant; errors name the offending field.
    pub fn validate(&self) -> Result<(), ScenarioError> {
        let l = self.grid.side_length_m();

        if self.gbs_list.is_empty() {
            return Err(ScenarioError::invalid("gbs", "at least one GBS required"));
        }
        for (n, g) in self.gbs_list.iter().enumerate() {
            if !g.position.z.is_finite() || g.position.z <= 0.0 {
                return Err(ScenarioError::invalid(
                    format!("gbs[{n}].position"),
                    "height must be positive and finite",
                ));
            }
            if g.position.x < 0.0 || g.position.x > l || g.position.y < 0.0 || g.position.y > l {
                return Err(ScenarioError::invalid(
                    format!("gbs[{n}].position"),
                    "horizontal position outside region",
                ));
            }
            if !g.transmit_power_dbm.is_finite() {
                return Err(ScenarioError::invalid(
                    format!("gbs[{n}].transmit_power_dbm"),
                    "must be finite",
                ));
            }
        }

        for (n, o) in self.obstacles.iter().enumerate() {
            let extents = [o.x_min_m, o.x_max_m, o.y_min_m, o.y_max_m, o.height_m];
            if extents.iter().any(|v| !v.is_finite()) {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{n}]"),
                    "all extents must be finite",
                ));
            }
            if o.x_min_m >= o.x_max_m || o.y_min_m >= o.y_max_m {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{n}]"),
                    "footprint must have positive extent",
                ));
            }
            if o.x_min_m < 0.0 || o.x_max_m > l || o.y_min_m < 0.0 || o.y_max_m > l {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{n}]"),
                    "footprint outside region",
                ));
            }
            if o.height_m <= 0.0 {
                return Err(ScenarioError::invalid(
                    format!("obstacles[{n}].height_m"),
                    "must be positive",
                ));
            }
        }

        if self.mixture.is_empty() {
            return Err(ScenarioError::invalid(
                "mixture",
                "at least one component required",
            ));
        }
        let mut weight_sum = 0.0;
        for (n, c) in self.mixture.iter().enumerate() {
            if !c.sigma_m.is_finite() || c.sigma_m <= 0.0 {
                return Err(ScenarioError::invalid(
                    format!("mixture[{n}].sigma_m"),
                    "must be positive",
                ));
            }
            if !(0.0..=1.0).contains(&c.weight) {
                return Err(ScenarioError::invalid(
                    format!("mixture[{n}].weight"),
                    "must lie in [0, 1]",
                ));
            }
            weight_sum += c.weight;
        }
        if (weight_sum - 1.0).abs() > 1e-9 {
            return Err(ScenarioError::invalid(
                "mixture",
                format!("component weights sum to {weight_sum}, expected 1"),
            ));
        }

        if !self.uav_altitude_m.is_finite() || self.uav_altitude_m <= 0.0 {
            return Err(ScenarioError::invalid(
                "uav.altitude_m",
                "must be positive",
            ));
        }
        if !self.noise_power_dbm.is_finite() {
            return Err(ScenarioError::invalid(
                "uav.noise_power_dbm",
                "must be finite",
            ));
        }
        if !self.snr_threshold_db.is_finite() {
            return Err(ScenarioError::invalid(
                "uav.snr_threshold_db",
                "must be finite",
            ));
        }
        // Channel model domain: every GBS-to-grid-center link must be >= 1 m.
        for (n, g) in self.gbs_list.iter().enumerate() {
            let min_d = self
                .grid
                .cells()
                .map(|idx| {
                    let c = self.grid.center(idx).expect("cell in bounds");
                    g.position
                        .distance_to(Point3::new(c.x, c.y, self.uav_altitude_m))
                })
                .fold(f64::INFINITY, f64::min);
            if min_d < 1.0 {
                return Err(ScenarioError::invalid(
                    format!("gbs[{n}]"),
                    "some GBS-to-grid-point distance is below the 1 m channel-model domain",
                ));
            }
        }

        for (name, idx) in [("uav.start", self.start), ("uav.finish", self.finish)] {
            if !self.grid.in_bounds(idx) {
                return Err(ScenarioError::invalid(
                    name,
                    format!("index {idx} outside 1..{}", self.grid.dimension()),
                ));
            }
        }

        let dbar = self.distance_budget_m();
        if !dbar.is_finite() || dbar < 0.0 {
            return Err(ScenarioError::invalid(
                "uav budget",
                "distance budget must be non-negative and finite",
            ));
        }
        if matches!(self.budget, Budget::SpeedTime { speed_mps, max_time_s } if speed_mps <= 0.0 || max_time_s <= 0.0)
        {
            return Err(ScenarioError::invalid(
                "uav budget",
                "speed_mps and max_time_s must be positive",
            ));
        }

        if !self.floor_epsilon.is_finite() || self.floor_epsilon <= 0.0 {
            return Err(ScenarioError::invalid(
                "solver.floor_epsilon",
                "must be positive",
            ));
        }

        self.channel
            .validate(self.max_link_distance_m())
            .map_err(|e| ScenarioError::invalid("channel", e.to_string()))?;

        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid scenario field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("grid index {index} out of bounds for dimension {dimension}")]
    OutOfBounds { index: GridIndex, dimension: usize },
}

impl ScenarioError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        ScenarioError::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }
}

// ── file model ────────────────────────────────────────────────────────────
//
// Serde mirror of the domain types. Field order here fixes the on-disk
// ordering of saved scenarios.

#[derive(Debug, Serialize, Deserialize)]
struct ScenarioFile {
    grid: GridFile,
    gbs: Vec<GbsFile>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    obstacles: Vec<ObstacleFile>,
    mixture: Vec<MixtureFile>,
    uav: UavFile,
    channel: ChannelFile,
    #[serde(default)]
    solver: SolverFile,
}

#[derive(Debug, Serialize, Deserialize)]
struct GridFile {
    side_length_m: f64,
    granularity_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct GbsFile {
    position: [f64; 3],
    transmit_power_dbm: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObstacleFile {
    x_min_m: f64,
    x_max_m: f64,
    y_min_m: f64,
    y_max_m: f64,
    height_m: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct MixtureFile {
    mean: [f64; 2],
    sigma_m: f64,
    weight: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct UavFile {
    altitude_m: f64,
    noise_power_dbm: f64,
    snr_threshold_db: f64,
    /// 1-based grid index pair.
    start: [usize; 2],
    /// 1-based grid index pair.
    finish: [usize; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    distance_budget_m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    speed_mps: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    max_time_s: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ChannelFile {
    intercept_los_db: f64,
    pathloss_exponent_los: f64,
    intercept_nlos_db: f64,
    pathloss_exponent_nlos: f64,
}

#[derive(Debug, Serialize, Deserialize)]
struct SolverFile {
    #[serde(default)]
    rng_seed: u64,
    #[serde(default = "default_floor_epsilon")]
    floor_epsilon: f64,
}

impl Default for SolverFile {
    fn default() -> Self {
        Self {
            rng_seed: 0,
            floor_epsilon: default_floor_epsilon(),
        }
    }
}

fn default_floor_epsilon() -> f64 {
    1e-12
}

/// Parses and validates a scenario document.
pub fn load_scenario(source: &[u8]) -> Result<ScenarioConfig, ScenarioError> {
    let text =
        std::str::from_utf8(source).map_err(|e| ScenarioError::Parse(format!("not UTF-8: {e}")))?;
    let file: ScenarioFile =
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))?;

    let grid = GridSpec::new(file.grid.side_length_m, file.grid.granularity_m)?;

    let budget = match (
        file.uav.distance_budget_m,
        file.uav.speed_mps,
        file.uav.max_time_s,
    ) {
        (Some(d), None, None) => Budget::DistanceM(d),
        (None, Some(v), Some(t)) => Budget::SpeedTime {
            speed_mps: v,
            max_time_s: t,
        },
        _ => {
            return Err(ScenarioError::invalid(
                "uav",
                "give either distance_budget_m or both speed_mps and max_time_s",
            ))
        }
    };

    let config = ScenarioConfig {
        grid,
        gbs_list: file
            .gbs
            .iter()
            .map(|g| Gbs {
                position: Point3::new(g.position[0], g.position[1], g.position[2]),
                transmit_power_dbm: g.transmit_power_dbm,
            })
            .collect(),
        obstacles: file
            .obstacles
            .iter()
            .map(|o| Obstacle {
                x_min_m: o.x_min_m,
                x_max_m: o.x_max_m,
                y_min_m: o.y_min_m,
                y_max_m: o.y_max_m,
                height_m: o.height_m,
            })
            .collect(),
        mixture: file
            .mixture
            .iter()
            .map(|c| GmmComponent {
                mean: Point2::new(c.mean[0], c.mean[1]),
                sigma_m: c.sigma_m,
                weight: c.weight,
            })
            .collect(),
        uav_altitude_m: file.uav.altitude_m,
        noise_power_dbm: file.uav.noise_power_dbm,
        snr_threshold_db: file.uav.snr_threshold_db,
        start: GridIndex::from_one_based(file.uav.start[0], file.uav.start[1])?,
        finish: GridIndex::from_one_based(file.uav.finish[0], file.uav.finish[1])?,
        budget,
        channel: ChannelParams {
            intercept_los_db: file.channel.intercept_los_db,
            pathloss_exponent_los: file.channel.pathloss_exponent_los,
            intercept_nlos_db: file.channel.intercept_nlos_db,
            pathloss_exponent_nlos: file.channel.pathloss_exponent_nlos,
        },
        rng_seed: file.solver.rng_seed,
        floor_epsilon: file.solver.floor_epsilon,
    };
    config.validate()?;
    Ok(config)
}

/// Convenience loader from a filesystem path.
pub fn load_scenario_path(path: &std::path::Path) -> Result<ScenarioConfig, ScenarioError> {
    let bytes = std::fs::read(path)
        .map_err(|e| ScenarioError::Parse(format!("{}: {e}", path.display())))?;
    load_scenario(&bytes)
}

/// Serializes a config back to the scenario document format.
///
/// Field ordering is fixed, so output for a given config is byte-stable.
pub fn save_scenario(config: &ScenarioConfig) -> String {
    let (db, v, t) = match config.budget {
        Budget::DistanceM(d) => (Some(d), None, None),
        Budget::SpeedTime {
            speed_mps,
            max_time_s,
        } => (None, Some(speed_mps), Some(max_time_s)),
    };
    let file = ScenarioFile {
        grid: GridFile {
            side_length_m: config.grid.side_length_m(),
            granularity_m: config.grid.granularity_m(),
        },
        gbs: config
            .gbs_list
            .iter()
            .map(|g| GbsFile {
                position: [g.position.x, g.position.y, g.position.z],
                transmit_power_dbm: g.transmit_power_dbm,
            })
            .collect(),
        obstacles: config
            .obstacles
            .iter()
            .map(|o| ObstacleFile {
                x_min_m: o.x_min_m,
                x_max_m: o.x_max_m,
                y_min_m: o.y_min_m,
                y_max_m: o.y_max_m,
                height_m: o.height_m,
            })
            .collect(),
        mixture: config
            .mixture
            .iter()
            .map(|c| MixtureFile {
                mean: [c.mean.x, c.mean.y],
                sigma_m: c.sigma_m,
                weight: c.weight,
            })
            .collect(),
        uav: UavFile {
            altitude_m: config.uav_altitude_m,
            noise_power_dbm: config.noise_power_dbm,
            snr_threshold_db: config.snr_threshold_db,
            start: [config.start.one_based().0, config.start.one_based().1],
            finish: [config.finish.one_based().0, config.finish.one_based().1],
            distance_budget_m: db,
            speed_mps: v,
            max_time_s: t,
        },
        channel: ChannelFile {
            intercept_los_db: config.channel.intercept_los_db,
            pathloss_exponent_los: config.channel.pathloss_exponent_los,
            intercept_nlos_db: config.channel.intercept_nlos_db,
            pathloss_exponent_nlos: config.channel.pathloss_exponent_nlos,
        },
        solver: SolverFile {
            rng_seed: config.rng_seed,
            floor_epsilon: config.floor_epsilon,
        },
    };
    toml::to_string(&file).expect("scenario serialization cannot fail")
}
