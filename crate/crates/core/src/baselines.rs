//! Hopkins statistic, the single-view clusterability baseline.

use rand::seq::index;
use rand::Rng;

use crate::data::{concatenate, MultiViewDataset, ViewMatrix};
use crate::error::{MvcsError, Result};
use crate::par;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopkinsResult {
    /// `Σu / (Σu + Σw)`: about 0.5 for spatially random data, near 1 for
    /// clustered data.
    pub value: f64,
    pub m: usize,
    pub seed: u64,
    /// Nearest-data distances of the uniform probes.
    pub sum_u: f64,
    /// Nearest-other-point distances of the sampled real points.
    pub sum_w: f64,
}

/// `min(100, N / 10)`, at least 1.
pub fn default_probe_count(n: usize) -> usize {
    (n / 10).clamp(1, 100)
}

/// Hopkins statistic with `m` probes.
///
/// Samples `m` real points without replacement and `m` uniform points in the
/// bounding box of the data. `u_j` is the distance from probe `j` to its
/// nearest data point, `w_j` the distance from sampled point `j` to its
/// nearest other data point.
pub fn hopkins(matrix: &ViewMatrix, m: usize, seed: u64) -> Result<HopkinsResult> {
    let n = matrix.rows();
    if m == 0 || m > n || n < 2 {
        return Err(MvcsError::MTooLarge { m, n });
    }
    let d = matrix.cols();
    let mut rng = rng::seeded(seed);

    let sampled = index::sample(&mut rng, n, m).into_vec();

    let (lo, hi): (Vec<f64>, Vec<f64>) = (0..d)
        .map(|j| {
            (0..n).fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), i| {
                let x = matrix.get(i, j);
                (lo.min(x), hi.max(x))
            })
        })
        .unzip();
    let probes: Vec<Vec<f64>> = (0..m)
        .map(|_| {
            (0..d)
                .map(|j| {
                    if hi[j] > lo[j] {
                        rng.random_range(lo[j]..hi[j])
                    } else {
                        lo[j]
                    }
                })
                .collect()
        })
        .collect();

    let u = par::map_range(m, |p| nearest_distance(matrix, &probes[p], None));
    let w = par::map_range(m, |p| {
        let i = sampled[p];
        nearest_distance(matrix, matrix.row(i), Some(i))
    });
    let sum_u: f64 = u.iter().sum();
    let sum_w: f64 = w.iter().sum();
    let total = sum_u + sum_w;
    let value = if total > 0.0 { sum_u / total } else { 0.5 };
    Ok(HopkinsResult {
        value,
        m,
        seed,
        sum_u,
        sum_w,
    })
}

/// Hopkins statistic of the concatenated standardized views.
pub fn hopkins_dataset(
    dataset: &MultiViewDataset,
    m: Option<usize>,
    seed: u64,
) -> Result<HopkinsResult> {
    let z = concatenate(dataset.standardized().views())?;
    let m = m.unwrap_or_else(|| default_probe_count(z.rows()));
    hopkins(&z, m, seed)
}

fn nearest_distance(matrix: &ViewMatrix, point: &[f64], skip: Option<usize>) -> f64 {
    let mut best = f64::INFINITY;
    for (i, row) in matrix.row_iter().enumerate() {
        if Some(i) == skip {
            continue;
        }
        let d2: f64 = row.iter().zip(point).map(|(a, b)| (a - b) * (a - b)).sum();
        best = best.min(d2);
    }
    best.sqrt()
}
