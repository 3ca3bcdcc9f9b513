//! Gaussian kernel density estimation on 1-D samples, grid-based mode
//! counting and the critical bandwidth of unimodality.
//!
//! With a Gaussian kernel the number of modes is non-increasing in the
//! bandwidth, so the smallest unimodal bandwidth can be found by bisection.

use std::f64::consts::PI;

use crate::config::ScoreConfig;
use crate::error::{MvcsError, Result};
use crate::par;

/// Lower end of the initial bracket, as a fraction of the sample range.
pub const BRACKET_LO_FRACTION: f64 = 1e-4;
/// First upper-bound guess, as a fraction of the sample range.
pub const BRACKET_HI_FRACTION: f64 = 0.1;
pub const MAX_DOUBLINGS: u32 = 40;
/// Grid margin beyond the sample range, in bandwidths.
pub const GRID_MARGIN: f64 = 3.0;

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A KDE: samples, bandwidth and the resolution used for mode counting.
#[derive(Debug, Clone, Copy)]
pub struct KdeSpec<'a> {
    pub samples: &'a [f64],
    pub bandwidth: f64,
    pub grid_points: usize,
}

impl<'a> KdeSpec<'a> {
    pub fn new(samples: &'a [f64], bandwidth: f64, grid_points: usize) -> Self {
        debug_assert!(!samples.is_empty());
        debug_assert!(bandwidth > 0.0);
        Self {
            samples,
            bandwidth,
            grid_points,
        }
    }

    /// Density at a single point. Samples are summed in input order.
    pub fn density_at(&self, x: f64) -> f64 {
        let h = self.bandwidth;
        let sum: f64 = self
            .samples
            .iter()
            .map(|&y| {
                let z = (x - y) / h;
                (-0.5 * z * z).exp()
            })
            .sum();
        sum * INV_SQRT_2PI / (self.samples.len() as f64 * h)
    }

    /// Evaluation grid `[min - 3h, max + 3h]` with `grid_points` points.
    pub fn grid(&self) -> Vec<f64> {
        let (lo, hi) = sample_range(self.samples);
        let a = lo - GRID_MARGIN * self.bandwidth;
        let b = hi + GRID_MARGIN * self.bandwidth;
        let g = self.grid_points.max(2);
        let step = (b - a) / (g - 1) as f64;
        (0..g).map(|j| a + j as f64 * step).collect()
    }
}

/// Evaluates the KDE at every query point.
pub fn kde_eval(spec: &KdeSpec<'_>, query_points: &[f64]) -> Vec<f64> {
    par::map_range(query_points.len(), |j| spec.density_at(query_points[j]))
}

/// Number of local maxima of the KDE on its evaluation grid.
///
/// A run of equal grid values flanked on both sides by strictly smaller
/// values counts once. The density is strictly increasing left of the
/// smallest sample and strictly decreasing right of the largest, so the
/// region beyond either grid end counts as smaller; at bandwidths below the
/// grid step the highest sampled point of an outer bump can be the end point.
pub fn mode_count(spec: &KdeSpec<'_>) -> usize {
    count_maxima(&kde_eval(spec, &spec.grid()))
}

pub(crate) fn count_maxima(values: &[f64]) -> usize {
    let g = values.len();
    let mut modes = 0;
    let mut i = 0;
    while i < g {
        let rises = i == 0 || values[i] > values[i - 1];
        let mut j = i;
        while j + 1 < g && values[j + 1] == values[i] {
            j += 1;
        }
        if rises && (j + 1 == g || values[j + 1] < values[i]) && values[i] > 0.0 {
            modes += 1;
        }
        i = j + 1;
    }
    modes
}

fn sample_range(samples: &[f64]) -> (f64, f64) {
    samples
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

/// Smallest unimodal bandwidth and the bisection bracket that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalBandwidth {
    pub value: f64,
    /// Mode-count evaluations spent (bracketing and bisection).
    pub iterations: usize,
    /// Final interval: multimodal at `.0`, unimodal at `.1`.
    pub bracket: (f64, f64),
}

impl CriticalBandwidth {
    fn zero() -> Self {
        Self {
            value: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
        }
    }
}

/// Finds `h_crit = inf { h > 0 : modes(h) <= 1 }` by bisection.
///
/// The bracket starts at `[1e-4 · range, 0.1 · range]`; the upper end doubles
/// until the estimate is unimodal. Bisection stops once
/// `h_hi - h_lo <= tol · h_hi` and returns `h_hi`. Samples with a single
/// distinct value, or already unimodal at the lower end, give `0`.
pub fn critical_bandwidth(samples: &[f64], config: &ScoreConfig) -> Result<CriticalBandwidth> {
    critical_bandwidth_with(samples, config.grid_points, config.bisect_rel_tol)
}

pub fn critical_bandwidth_with(
    samples: &[f64],
    grid_points: usize,
    rel_tol: f64,
) -> Result<CriticalBandwidth> {
    if samples.is_empty() {
        return Ok(CriticalBandwidth::zero());
    }
    let (lo, hi) = sample_range(samples);
    let range = hi - lo;
    if !range.is_finite() {
        return Err(MvcsError::BracketFailure { h_hi: range });
    }
    if range == 0.0 {
        return Ok(CriticalBandwidth::zero());
    }
    let modes = |h: f64| mode_count(&KdeSpec::new(samples, h, grid_points));
    let mut evals = 0usize;

    let mut h_lo = BRACKET_LO_FRACTION * range;
    evals += 1;
    if modes(h_lo) <= 1 {
        return Ok(CriticalBandwidth {
            value: 0.0,
            iterations: evals,
            bracket: (0.0, h_lo),
        });
    }

    let mut h_hi = BRACKET_HI_FRACTION * range;
    let mut doublings = 0;
    loop {
        evals += 1;
        if modes(h_hi) <= 1 {
            break;
        }
        h_lo = h_hi;
        if doublings == MAX_DOUBLINGS {
            return Err(MvcsError::BracketFailure { h_hi });
        }
        h_hi *= 2.0;
        doublings += 1;
    }

    while h_hi - h_lo > rel_tol * h_hi {
        let mid = 0.5 * (h_lo + h_hi);
        evals += 1;
        if modes(mid) <= 1 {
            h_hi = mid;
        } else {
            h_lo = mid;
        }
    }
    Ok(CriticalBandwidth {
        value: h_hi,
        iterations: evals,
        bracket: (h_lo, h_hi),
    })
}

/// Standard normal density.
pub fn gaussian_kernel(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * PI).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(samples: &[f64], h: f64) -> KdeSpec<'_> {
        KdeSpec::new(samples, h, 1024)
    }

    #[test]
    fn single_sample_density_at_center() {
        let d = kde_eval(&spec(&[0.0], 1.0), &[0.0]);
        assert!((d[0] - 0.398_942_280_401_432_7).abs() < 1e-15);
    }

    #[test]
    fn two_samples_density_midpoint() {
        let d = kde_eval(&spec(&[-1.0, 1.0], 1.0), &[0.0]);
        let expected = (-0.5f64).exp() / (2.0 * PI).sqrt();
        assert!((d[0] - expected).abs() < 1e-15);
        assert!((d[0] - 0.241971).abs() < 1e-6);
    }

    #[test]
    fn density_integrates_to_one() {
        let samples = [-2.0, -1.7, 0.3, 0.4, 3.9];
        let h = 0.6;
        let s = spec(&samples, h);
        let (a, b) = (-2.0 - 6.0 * h, 3.9 + 6.0 * h);
        let n = 20_001;
        let dx = (b - a) / (n - 1) as f64;
        let xs: Vec<f64> = (0..n).map(|i| a + i as f64 * dx).collect();
        let f = kde_eval(&s, &xs);
        let integral: f64 = f.windows(2).map(|w| 0.5 * (w[0] + w[1]) * dx).sum();
        assert!((integral - 1.0).abs() < 1e-3, "{integral}");
        assert!(f.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn modes_of_two_points() {
        assert_eq!(mode_count(&spec(&[-5.0, 5.0], 0.5)), 2);
        assert_eq!(mode_count(&spec(&[-5.0, 5.0], 10.0)), 1);
        assert_eq!(mode_count(&spec(&[2.0, 2.0, 2.0], 0.3)), 1);
    }

    #[test]
    fn plateau_counts_once() {
        assert_eq!(count_maxima(&[0.0, 1.0, 1.0, 1.0, 0.5]), 1);
        assert_eq!(count_maxima(&[0.0, 1.0, 1.0, 2.0, 0.5]), 1);
        assert_eq!(count_maxima(&[0.0, 1.0, 0.0, 1.0, 0.0]), 2);
        // Beyond the grid the density keeps falling.
        assert_eq!(count_maxima(&[0.0, 1.0, 1.0]), 1);
        assert_eq!(count_maxima(&[2.0, 1.0, 0.5, 1.0, 0.2]), 2);
        assert_eq!(count_maxima(&[0.0, 0.0, 0.0]), 0);
    }

    #[test]
    fn two_point_critical_bandwidth_is_half_separation() {
        let cfg = ScoreConfig::default();
        for a in [0.5, 1.0, 3.0] {
            let hc = critical_bandwidth(&[-a, a], &cfg).unwrap();
            assert!(
                ((hc.value - a) / a).abs() <= 2.0 * cfg.bisect_rel_tol,
                "a = {a}: {hc:?}"
            );
            assert!(hc.bracket.0 < hc.bracket.1);
        }
    }

    #[test]
    fn constant_samples_have_zero_critical_bandwidth() {
        let hc = critical_bandwidth(&[4.2; 10], &ScoreConfig::default()).unwrap();
        assert_eq!(hc.value, 0.0);
    }

    #[test]
    fn critical_bandwidth_brackets_unimodality() {
        let cfg = ScoreConfig::default();
        let samples = [-3.1, -2.9, -2.5, 0.1, 0.2, 2.7, 3.3, 3.4];
        let hc = critical_bandwidth(&samples, &cfg).unwrap();
        let tol = cfg.bisect_rel_tol;
        assert!(mode_count(&spec(&samples, hc.value * (1.0 + tol))) <= 1);
        assert!(mode_count(&spec(&samples, hc.value * (1.0 - tol))) > 1);
    }

    #[test]
    fn non_finite_spread_fails_to_bracket() {
        let err = critical_bandwidth(&[-f64::MAX, f64::MAX], &ScoreConfig::default());
        assert!(matches!(err, Err(MvcsError::BracketFailure { .. })));
    }
}
