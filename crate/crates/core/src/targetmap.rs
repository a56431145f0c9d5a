//! Target location distribution map.
//!
//! The target's horizontal position follows a 2D Gaussian mixture. Each grid
//! cell's sensing probability is the exact integral of that PDF over the
//! cell, computed in closed form from the separability of isotropic
//! components. Cells overlapping obstacles are removed and the remaining
//! probabilities renormalized so the kept cells sum to one; exact-zero
//! entries are floored only in the inverse-weight view so that inverse costs
//! stay finite.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::scenario::{GmmComponent, GridIndex, GridSpec, Obstacle, Point2, ScenarioConfig};

/// Standard normal CDF via the complementary error function.
fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / std::f64::consts::SQRT_2)
}

/// Mixture PDF value at a point, 1/m².
pub fn gmm_pdf(point: Point2, mixture: &[GmmComponent]) -> f64 {
    mixture
        .iter()
        .map(|c| {
            let dx = point.x - c.mean.x;
            let dy = point.y - c.mean.y;
            let s2 = c.sigma_m * c.sigma_m;
            c.weight / (2.0 * std::f64::consts::PI * s2) * (-(dx * dx + dy * dy) / (2.0 * s2)).exp()
        })
        .sum()
}

/// Exact integral of the mixture PDF over cell `idx`.
///
/// Each isotropic component factors into per-axis CDF differences:
/// `Σ_s p_s · [Φ((x_hi−x_s)/σ_s) − Φ((x_lo−x_s)/σ_s)] · [Φ(…y…) − Φ(…y…)]`.
pub fn grid_probability(idx: GridIndex, mixture: &[GmmComponent], grid: &GridSpec) -> f64 {
    let delta = grid.granularity_m();
    let x_lo = idx.i as f64 * delta;
    let x_hi = x_lo + delta;
    let y_lo = idx.j as f64 * delta;
    let y_hi = y_lo + delta;
    mixture
        .iter()
        .map(|c| {
            let px = normal_cdf((x_hi - c.mean.x) / c.sigma_m)
                - normal_cdf((x_lo - c.mean.x) / c.sigma_m);
            let py = normal_cdf((y_hi - c.mean.y) / c.sigma_m)
                - normal_cdf((y_lo - c.mean.y) / c.sigma_m);
            c.weight * px * py
        })
        .sum::<f64>()
        .max(0.0)
}

/// Marks cells whose footprint overlaps any obstacle footprint with
/// positive area. Row-major `i·D + j` layout.
pub fn obstacle_mask(grid: &GridSpec, obstacles: &[Obstacle]) -> Vec<bool> {
    let delta = grid.granularity_m();
    grid.cells()
        .map(|idx| {
            let x_lo = idx.i as f64 * delta;
            let y_lo = idx.j as f64 * delta;
            obstacles
                .iter()
                .any(|o| o.footprint_overlaps(x_lo, x_lo + delta, y_lo, y_lo + delta))
        })
        .collect()
}

/// D × D matrix of per-cell sensing probabilities after obstacle truncation.
#[derive(Debug, Clone, PartialEq)]
pub struct TargetMap {
    dimension: usize,
    probs: Vec<f64>,
    blocked: Vec<bool>,
    floor_epsilon: f64,
}

impl TargetMap {
    /// Wraps a raw probability matrix (no truncation applied).
    pub fn from_probs(
        dimension: usize,
        probs: Vec<f64>,
        floor_epsilon: f64,
    ) -> Result<Self, TargetMapError> {
        if probs.len() != dimension * dimension {
            return Err(TargetMapError::DimensionMismatch {
                expected: dimension,
                got: probs.len(),
            });
        }
        if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
            return Err(TargetMapError::BadProbability);
        }
        let sum: f64 = probs.iter().sum();
        if sum > 1.0 + 1e-9 {
            return Err(TargetMapError::BadProbability);
        }
        Ok(Self {
            dimension,
            probs,
            blocked: vec![false; dimension * dimension],
            floor_epsilon,
        })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Stored sensing probability of 0-based cell `(i, j)`; exact zeros stay zero.
    pub fn prob(&self, i: usize, j: usize) -> f64 {
        self.probs[i * self.dimension + j]
    }

    pub fn prob_at(&self, idx: GridIndex) -> f64 {
        self.prob(idx.i, idx.j)
    }

    /// Inverse-probability weight `1 / max(prob, floor_epsilon)`; always finite.
    pub fn inverse_weight(&self, i: usize, j: usize) -> f64 {
        1.0 / self.prob(i, j).max(self.floor_epsilon)
    }

    pub fn is_blocked(&self, i: usize, j: usize) -> bool {
        self.blocked[i * self.dimension + j]
    }

    pub fn blocked_mask(&self) -> &[bool] {
        &self.blocked
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn floor_epsilon(&self) -> f64 {
        self.floor_epsilon
    }

    /// Exports as CSV of probabilities, row i = x-index, column j = y-index.
    pub fn to_csv(&self) -> String {
        let d = self.dimension;
        let mut out = String::new();
        for i in 0..d {
            for j in 0..d {
                if j > 0 {
                    out.push(',');
                }
                out.push_str(&format!("{:.10e}", self.prob(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

/// Integrates the mixture per cell, zeroes blocked cells, and renormalizes
/// the kept cells to total probability one.
pub fn build_target_map(
    config: &ScenarioConfig,
    blocked: &[bool],
) -> Result<TargetMap, TargetMapError> {
    let d = config.grid.dimension();
    assert_eq!(blocked.len(), d * d, "mask dimension mismatch");
    if blocked.iter().all(|b| *b) {
        return Err(TargetMapError::EmptySupport);
    }
    let mut probs: Vec<f64> = config
        .grid
        .cells()
        .map(|idx| grid_probability(idx, &config.mixture, &config.grid))
        .collect();
    for (p, b) in probs.iter_mut().zip(blocked) {
        if *b {
            *p = 0.0;
        }
    }
    let kept_sum: f64 = probs.iter().sum();
    if !kept_sum.is_finite() || kept_sum <= 0.0 {
        return Err(TargetMapError::EmptySupport);
    }
    for p in &mut probs {
        *p /= kept_sum;
    }
    Ok(TargetMap {
        dimension: d,
        probs,
        blocked: blocked.to_vec(),
        floor_epsilon: config.floor_epsilon,
    })
}

/// Draws target locations from the mixture, rejection-resampling anything
/// outside the region or inside a blocked cell so that empirical frequencies
/// match the truncated map.
pub struct TargetSampler {
    mixture: Vec<GmmComponent>,
    grid: GridSpec,
    blocked: Vec<bool>,
    rng: ChaCha8Rng,
}

impl TargetSampler {
    const MAX_ATTEMPTS: u32 = 100_000;

    pub fn new(config: &ScenarioConfig, blocked: &[bool], seed: u64) -> Self {
        Self {
            mixture: config.mixture.clone(),
            grid: config.grid,
            blocked: blocked.to_vec(),
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Samples the raw (untruncated) mixture.
    pub fn sample_raw(&mut self) -> Point2 {
        let u: f64 = self.rng.random();
        let mut acc = 0.0;
        let mut chosen = self.mixture.len() - 1;
        for (k, c) in self.mixture.iter().enumerate() {
            acc += c.weight;
            if u < acc {
                chosen = k;
                break;
            }
        }
        let c = &self.mixture[chosen];
        let normal = Normal::new(0.0, c.sigma_m).expect("sigma validated positive");
        Point2::new(
            c.mean.x + normal.sample(&mut self.rng),
            c.mean.y + normal.sample(&mut self.rng),
        )
    }

    /// Samples the truncated distribution; errors if the acceptance region
    /// is so small that the rejection loop stalls.
    pub fn sample(&mut self) -> Result<Point2, TargetMapError> {
        let l = self.grid.side_length_m();
        for _ in 0..Self::MAX_ATTEMPTS {
            let p = self.sample_raw();
            if p.x < 0.0 || p.x >= l || p.y < 0.0 || p.y >= l {
                continue;
            }
            let idx = self.cell_of(p);
            if self.blocked[self.grid.linear(idx)] {
                continue;
            }
            return Ok(p);
        }
        Err(TargetMapError::RejectionLimit)
    }

    /// Cell containing a point inside the region.
    pub fn cell_of(&self, p: Point2) -> GridIndex {
        let d = self.grid.dimension();
        let delta = self.grid.granularity_m();
        let i = ((p.x / delta).floor() as usize).min(d - 1);
        let j = ((p.y / delta).floor() as usize).min(d - 1);
        GridIndex::new(i, j)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TargetMapError {
    #[error("target map dimension mismatch: expected {expected}x{expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("probabilities must lie in [0,1] and sum to at most 1")]
    BadProbability,
    #[error("no unblocked cell carries probability mass")]
    EmptySupport,
    #[error("sampler rejection limit exceeded; acceptance region too small")]
    RejectionLimit,
}
