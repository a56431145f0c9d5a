//! Obstacle-aware channel model and the expected SNR map.
//!
//! Large-scale gains use a two-state (LoS/NLoS) log-distance path-loss model
//! with configurable intercepts and exponents; antenna gains are folded into
//! the intercepts. Shadowing is deterministic: a link is NLoS iff the 3D
//! segment between the GBS antenna and the UAV is blocked by an obstacle box.
//! The map itself can instead be imported from measurements as a CSV of dB
//! values.

use crate::scenario::{Gbs, GridSpec, Obstacle, Point2, Point3, ScenarioConfig};

/// Log-distance path-loss parameters: `PL(d) = β₀ + 10·α·log₁₀(d)` dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelParams {
    pub intercept_los_db: f64,
    pub pathloss_exponent_los: f64,
    pub intercept_nlos_db: f64,
    pub pathloss_exponent_nlos: f64,
}

impl ChannelParams {
    /// Path loss in dB for a given state and 3D distance.
    fn path_loss_db(&self, los: bool, distance_m: f64) -> f64 {
        let (b0, alpha) = if los {
            (self.intercept_los_db, self.pathloss_exponent_los)
        } else {
            (self.intercept_nlos_db, self.pathloss_exponent_nlos)
        };
        b0 + 10.0 * alpha * distance_m.log10()
    }

    /// Checks exponents and that NLoS loss dominates LoS loss over
    /// `[1 m, max_distance_m]`. The loss difference is linear in log-distance,
    /// so the two endpoints bound the whole range.
    pub fn validate(&self, max_distance_m: f64) -> Result<(), RadioError> {
        for (name, v) in [
            ("pathloss_exponent_los", self.pathloss_exponent_los),
            ("pathloss_exponent_nlos", self.pathloss_exponent_nlos),
        ] {
            if !v.is_finite() || v < 1.0 {
                return Err(RadioError::BadParams(format!("{name} must be >= 1, got {v}")));
            }
        }
        for v in [self.intercept_los_db, self.intercept_nlos_db] {
            if !v.is_finite() {
                return Err(RadioError::BadParams("intercepts must be finite".into()));
            }
        }
        let d_hi = max_distance_m.max(1.0);
        for d in [1.0, d_hi] {
            if self.path_loss_db(false, d) < self.path_loss_db(true, d) {
                return Err(RadioError::BadParams(format!(
                    "NLoS loss below LoS loss at distance {d} m"
                )));
            }
        }
        Ok(())
    }
}

/// D × D matrix of expected SNR values at grid centers, linear scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SnrMap {
    dimension: usize,
    values: Vec<f64>,
}

impl SnrMap {
    /// Wraps a row-major linear-scale matrix.
    pub fn from_linear(dimension: usize, values: Vec<f64>) -> Result<Self, RadioError> {
        if values.len() != dimension * dimension {
            return Err(RadioError::DimensionMismatch {
                expected: dimension,
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite() || **v <= 0.0) {
            return Err(RadioError::BadValue(*v));
        }
        Ok(Self { dimension, values })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Linear-scale expected SNR at 0-based cell `(i, j)`.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dimension + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Exports as CSV of dB values, row i = x-index, column j = y-index.
    pub fn to_csv_db(&self) -> String {
        let d = self.dimension;
        let mut out = String::new();
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{:.6}", 10.0 * self.get(i, j).log10()));
            }
            out.push('\n');
        }
        out
    }
}

/// Parses a D × D CSV of dB values (optional header row) into a linear map.
pub fn import_snr_map(source: &[u8], grid: &GridSpec) -> Result<SnrMap, RadioError> {
    let text = std::str::from_utf8(source)
        .map_err(|e| RadioError::Csv(format!("not UTF-8: {e}")))?;
    let d = grid.dimension();
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut seen_content = false;
    for (lineno, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parsed: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
        match parsed {
            Ok(row) => rows.push(row),
            Err(e) => {
                // a non-numeric first content line is an optional header
                if !seen_content {
                    seen_content = true;
                    continue;
                }
                return Err(RadioError::Csv(format!("line {}: {e}", lineno + 1)));
            }
        }
        seen_content = true;
    }
    if rows.len() != d || rows.iter().any(|r| r.len() != d) {
        return Err(RadioError::DimensionMismatch {
            expected: d,
            got: rows.first().map_or(rows.len(), |r| r.len().max(rows.len())),
        });
    }
    let mut values = Vec::with_capacity(d * d);
    for row in &rows {
        for &db in row {
            if !db.is_finite() {
                return Err(RadioError::BadValue(db));
            }
            values.push(10f64.powf(db / 10.0));
        }
    }
    SnrMap::from_linear(d, values)
}

/// True iff the open 3D segment `a`–`b` is clear of every obstacle box.
///
/// Boxes extend from the ground to `height_m`; touching a face counts as
/// blocked (slab intersection with inclusive bounds).
pub fn line_of_sight(a: Point3, b: Point3, obstacles: &[Obstacle]) -> bool {
    !obstacles.iter().any(|o| segment_hits_box(a, b, o))
}

fn segment_hits_box(a: Point3, b: Point3, o: &Obstacle) -> bool {
    let dir = [b.x - a.x, b.y - a.y, b.z - a.z];
    let origin = [a.x, a.y, a.z];
    let lo = [o.x_min_m, o.y_min_m, 0.0];
    let hi = [o.x_max_m, o.y_max_m, o.height_m];

    let mut t_min = 0.0f64;
    let mut t_max = 1.0f64;
    for axis in 0..3 {
        if dir[axis] == 0.0 {
            if origin[axis] < lo[axis] || origin[axis] > hi[axis] {
                return false;
            }
        } else {
            let inv = 1.0 / dir[axis];
            let mut t0 = (lo[axis] - origin[axis]) * inv;
            let mut t1 = (hi[axis] - origin[axis]) * inv;
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            t_min = t_min.max(t0);
            t_max = t_max.min(t1);
            if t_min > t_max {
                return false;
            }
        }
    }
    true
}

/// Linear amplitude gain ḡ of the GBS→UAV link above `grid_point`.
///
/// `ḡ² = 10^(−PL/10)` with the LoS/NLoS path loss chosen by obstacle
/// blockage; the returned amplitude is `10^(−PL/20)`.
pub fn large_scale_gain(
    gbs: &Gbs,
    grid_point: Point2,
    altitude_m: f64,
    obstacles: &[Obstacle],
    params: &ChannelParams,
) -> Result<f64, RadioError> {
    let uav = Point3::new(grid_point.x, grid_point.y, altitude_m);
    let d = gbs.position.distance_to(uav);
    if d < 1.0 {
        return Err(RadioError::DistanceBelowDomain(d));
    }
    let los = line_of_sight(gbs.position, uav, obstacles);
    let pl_db = params.path_loss_db(los, d);
    Ok(10f64.powf(-pl_db / 20.0))
}

/// Builds the expected SNR map: each entry is the best GBS's `P·ḡ²/σ²`.
pub fn build_snr_map(config: &ScenarioConfig) -> Result<SnrMap, RadioError> {
    let d = config.grid.dimension();
    let noise_mw = config.noise_power_mw();
    let mut values = Vec::with_capacity(d * d);
    for idx in config.grid.cells() {
        let center = config.grid.center(idx).expect("cell in bounds");
        let mut best = f64::NEG_INFINITY;
        for gbs in &config.gbs_list {
            let gain = large_scale_gain(
                gbs,
                center,
                config.uav_altitude_m,
                &config.obstacles,
                &config.channel,
            )?;
            let snr = gbs.transmit_power_mw() * gain * gain / noise_mw;
            best = best.max(snr);
        }
        values.push(best);
    }
    SnrMap::from_linear(d, values)
}

#[derive(Debug, thiserror::Error)]
pub enum RadioError {
    #[error("invalid channel parameters: {0}")]
    BadParams(String),
    #[error("link distance {0} m below the 1 m model domain")]
    DistanceBelowDomain(f64),
    #[error("SNR map dimension mismatch: expected {expected}x{expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("SNR map entry {0} is not a positive finite value")]
    BadValue(f64),
    #[error("SNR map CSV error: {0}")]
    Csv(String),
}
