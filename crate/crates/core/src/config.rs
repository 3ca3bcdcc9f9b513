use serde::{Deserialize, Serialize};

use crate::error::{MvcsError, Result};

/// Every free parameter of the score, in one place.
///
/// Defaults: `tau = 1`, `k = 10`, weights `(0.2, 0.2, 0.6)`, `eta = 0.5`,
/// a 1024-point KDE grid, bisection tolerance `1e-3`, seed `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoreConfig {
    /// Sensitivity of the bandwidth-to-score transform.
    pub tau: f64,
    /// Neighbor count for cross-view consistency.
    pub k: usize,
    /// Weight of the mean per-view component.
    pub alpha: f64,
    /// Weight of the joint-space component.
    pub beta: f64,
    /// Weight of the neighborhood-consistency component.
    pub gamma: f64,
    /// Scale of the final calibration `1 - exp(-raw / eta)`.
    pub eta: f64,
    /// Number of points on the KDE evaluation grid.
    pub grid_points: usize,
    /// Relative tolerance of the critical-bandwidth bisection.
    pub bisect_rel_tol: f64,
    /// Seed for every randomized step (power-iteration start vector, noise).
    pub seed: u64,
}

impl ScoreConfig {
    pub const DEFAULT_TAU: f64 = 1.0;
    pub const DEFAULT_K: usize = 10;
    pub const DEFAULT_ALPHA: f64 = 0.2;
    pub const DEFAULT_BETA: f64 = 0.2;
    pub const DEFAULT_GAMMA: f64 = 0.6;
    pub const DEFAULT_ETA: f64 = 0.5;
    pub const DEFAULT_GRID_POINTS: usize = 1024;
    pub const DEFAULT_BISECT_REL_TOL: f64 = 1e-3;
    pub const DEFAULT_SEED: u64 = 0;
    pub const MIN_GRID_POINTS: usize = 64;

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(MvcsError::InvalidConfig(msg));
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return bad(format!("tau must be positive, got {}", self.tau));
        }
        if self.k == 0 {
            return bad("k must be at least 1".into());
        }
        for (name, w) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
        ] {
            if !(w.is_finite() && w >= 0.0) {
                return bad(format!("{name} must be non-negative, got {w}"));
            }
        }
        let total = self.alpha + self.beta + self.gamma;
        if (total - 1.0).abs() > 1e-12 {
            return bad(format!("alpha + beta + gamma must equal 1, got {total}"));
        }
        if !(self.eta.is_finite() && self.eta > 0.0) {
            return bad(format!("eta must be positive, got {}", self.eta));
        }
        if self.grid_points < Self::MIN_GRID_POINTS {
            return bad(format!(
                "grid_points must be at least {}, got {}",
                Self::MIN_GRID_POINTS,
                self.grid_points
            ));
        }
        if !(self.bisect_rel_tol > 0.0 && self.bisect_rel_tol < 1.0) {
            return bad(format!(
                "bisect_rel_tol must lie in (0, 1), got {}",
                self.bisect_rel_tol
            ));
        }
        Ok(())
    }

    /// Checks `k < n` on top of [`validate`](Self::validate).
    pub fn validate_for(&self, n: usize) -> Result<()> {
        self.validate()?;
        if self.k >= n {
            return Err(MvcsError::KTooLarge { k: self.k, n });
        }
        Ok(())
    }
}

impl Default for ScoreConfig {
    fn default() -> Self {
        Self {
            tau: Self::DEFAULT_TAU,
            k: Self::DEFAULT_K,
            alpha: Self::DEFAULT_ALPHA,
            beta: Self::DEFAULT_BETA,
            gamma: Self::DEFAULT_GAMMA,
            eta: Self::DEFAULT_ETA,
            grid_points: Self::DEFAULT_GRID_POINTS,
            bisect_rel_tol: Self::DEFAULT_BISECT_REL_TOL,
            seed: Self::DEFAULT_SEED,
        }
    }
}
