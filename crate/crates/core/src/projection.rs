//! Projection of a matrix onto its leading principal direction.
//!
//! Small matrices (`d <= 64`) go through a dense symmetric eigensolver on the
//! covariance. Wider ones use power iteration on the implicit covariance
//! `Xᵀ X / N`, which never materializes the `d × d` matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand_distr::{Distribution, StandardNormal};

use crate::data::ViewMatrix;
use crate::rng;

/// Column count up to which the dense eigensolver is used.
pub const DENSE_EIGEN_MAX_DIM: usize = 64;
pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 1000;

/// One-dimensional sample set obtained by projection.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection1D {
    pub values: Vec<f64>,
    /// Population standard deviation of `values`.
    pub sigma: f64,
}

impl Projection1D {
    pub fn from_values(values: Vec<f64>) -> Self {
        let sigma = population_std(&values);
        Self { values, sigma }
    }
}

pub(crate) fn population_std(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt()
}

/// Result of a power iteration run.
#[derive(Debug, Clone)]
pub struct PowerIteration {
    pub direction: Vec<f64>,
    pub eigenvalue: f64,
    pub iterations: usize,
    pub converged: bool,
}

fn centered(matrix: &ViewMatrix) -> ViewMatrix {
    let n = matrix.rows() as f64;
    matrix.map_columns(|_, col| {
        let mean = col.iter().sum::<f64>() / n;
        col.iter().map(|x| x - mean).collect()
    })
}

/// Projects `matrix` onto the unit leading eigenvector of its covariance.
///
/// The sign is fixed so the loading with the largest magnitude is positive.
/// An all-zero matrix projects to zeros with `sigma = 0`. `seed` only matters
/// on the power-iteration path (start vector).
pub fn principal_projection(matrix: &ViewMatrix, seed: u64) -> Projection1D {
    let n = matrix.rows();
    let x = centered(matrix);
    if x.as_slice().iter().all(|&v| v == 0.0) {
        return Projection1D {
            values: vec![0.0; n],
            sigma: 0.0,
        };
    }
    let direction = principal_direction(&x, seed);
    let values: Vec<f64> = x.row_iter().map(|row| dot(row, &direction)).collect();
    Projection1D::from_values(values)
}

/// Unit leading eigenvector of the covariance of an already-centered matrix,
/// sign-normalized.
pub fn principal_direction(centered: &ViewMatrix, seed: u64) -> Vec<f64> {
    let mut dir = if centered.cols() <= DENSE_EIGEN_MAX_DIM {
        dense_top_eigenvector(&covariance(centered))
    } else {
        power_iteration(centered, seed).direction
    };
    fix_sign(&mut dir);
    dir
}

/// Population covariance `Xᵀ X / N` of a centered matrix.
pub fn covariance(centered: &ViewMatrix) -> DMatrix<f64> {
    let n = centered.rows() as f64;
    let d = centered.cols();
    let mut cov = DMatrix::<f64>::zeros(d, d);
    for row in centered.row_iter() {
        for a in 0..d {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            for b in a..d {
                cov[(a, b)] += ra * row[b];
            }
        }
    }
    for a in 0..d {
        for b in a..d {
            let v = cov[(a, b)] / n;
            cov[(a, b)] = v;
            cov[(b, a)] = v;
        }
    }
    cov
}

fn dense_top_eigenvector(cov: &DMatrix<f64>) -> Vec<f64> {
    let eig = SymmetricEigen::new(cov.clone());
    let mut best = 0;
    for i in 1..eig.eigenvalues.len() {
        if eig.eigenvalues[i] > eig.eigenvalues[best] {
            best = i;
        }
    }
    eig.eigenvectors.column(best).iter().copied().collect()
}

/// Power iteration for the leading eigenvector of `Xᵀ X / N`, starting from a
/// seeded Gaussian vector. Stops when the (sign-aligned) direction moves less
/// than [`POWER_TOL`] or after [`POWER_MAX_ITER`] steps.
pub fn power_iteration(centered: &ViewMatrix, seed: u64) -> PowerIteration {
    let d = centered.cols();
    let n = centered.rows() as f64;
    let mut rng = rng::seeded(seed);
    let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(&mut rng)).collect();
    normalize(&mut v);

    let mut eigenvalue = 0.0;
    for it in 1..=POWER_MAX_ITER {
        let mut w = apply_covariance(centered, &v);
        w.iter_mut().for_each(|x| *x /= n);
        eigenvalue = dot(&w, &v);
        let norm = normalize(&mut w);
        if norm == 0.0 {
            // v lies in the null space; any direction is as good as another.
            return PowerIteration {
                direction: v,
                eigenvalue: 0.0,
                iterations: it,
                converged: true,
            };
        }
        if dot(&w, &v) < 0.0 {
            w.iter_mut().for_each(|x| *x = -*x);
        }
        let delta = w
            .iter()
            .zip(&v)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
        v = w;
        if delta < POWER_TOL {
            return PowerIteration {
                direction: v,
                eigenvalue,
                iterations: it,
                converged: true,
            };
        }
    }
    PowerIteration {
        direction: v,
        eigenvalue,
        iterations: POWER_MAX_ITER,
        converged: false,
    }
}

/// `Xᵀ (X v)` without forming the covariance.
fn apply_covariance(x: &ViewMatrix, v: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; x.cols()];
    for row in x.row_iter() {
        let s = dot(row, v);
        if s != 0.0 {
            for (o, r) in out.iter_mut().zip(row) {
                *o += s * r;
            }
        }
    }
    out
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = dot(v, v).sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// Largest-|loading| component positive; first index wins ties.
fn fix_sign(v: &mut [f64]) {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].abs() > v[best].abs() {
            best = i;
        }
    }
    if v.get(best).is_some_and(|&x| x < 0.0) {
        v.iter_mut().for_each(|x| *x = -*x);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::standardize;
    use rand::Rng;

    fn random_matrix(n: usize, d: usize, seed: u64) -> ViewMatrix {
        let mut rng = rng::seeded(seed);
        // Anisotropic columns so the leading eigenvalue is well separated.
        let values = (0..n * d)
            .map(|p| {
                let j = p % d;
                let z: f64 = StandardNormal.sample(&mut rng);
                z * (1.0 + j as f64)
            })
            .collect();
        ViewMatrix::new(n, d, values).unwrap()
    }

    #[test]
    fn perfectly_correlated_columns_scale_by_sqrt2() {
        let col = [-1.5, -0.5, 0.5, 1.5];
        let rows: Vec<Vec<f64>> = col.iter().map(|&x| vec![x, x]).collect();
        let p = principal_projection(&ViewMatrix::from_rows(&rows).unwrap(), 0);
        for (y, x) in p.values.iter().zip(col) {
            assert!((y.abs() - 2f64.sqrt() * x.abs()).abs() < 1e-12);
            assert!((y - 2f64.sqrt() * x).abs() < 1e-12 || (y + 2f64.sqrt() * x).abs() < 1e-12);
        }
    }

    #[test]
    fn all_zero_matrix_gives_zero_projection() {
        let m = ViewMatrix::new(5, 3, vec![0.0; 15]).unwrap();
        let p = principal_projection(&m, 0);
        assert_eq!(p.values, vec![0.0; 5]);
        assert_eq!(p.sigma, 0.0);
    }

    #[test]
    fn single_column_is_the_centered_column() {
        let m = ViewMatrix::from_column(&[1.0, 4.0, 7.0]).unwrap();
        let p = principal_projection(&m, 0);
        assert_eq!(p.values, vec![-3.0, 0.0, 3.0]);
        assert!((p.sigma - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn projection_is_centered_and_sigma_matches() {
        let m = standardize(&random_matrix(80, 6, 3));
        let p = principal_projection(&m, 0);
        let mean = p.values.iter().sum::<f64>() / 80.0;
        assert!(mean.abs() < 1e-10);
        assert!((p.sigma - population_std(&p.values)).abs() < 1e-10);
    }

    #[test]
    fn sign_convention_makes_largest_loading_positive() {
        let x = centered(&random_matrix(50, 4, 11));
        let dir = principal_direction(&x, 0);
        let (imax, _) = dir.iter().enumerate().fold((0, 0.0f64), |acc, (i, v)| {
            if v.abs() > acc.1 {
                (i, v.abs())
            } else {
                acc
            }
        });
        assert!(dir[imax] > 0.0);
    }

    #[test]
    fn projection_beats_random_directions() {
        let m = standardize(&random_matrix(120, 5, 5));
        let p = principal_projection(&m, 0);
        let var_best = p.sigma * p.sigma;
        let mut rng = rng::seeded(99);
        for _ in 0..100 {
            let mut u: Vec<f64> = (0..5).map(|_| rng.random::<f64>() - 0.5).collect();
            normalize(&mut u);
            let proj: Vec<f64> = m.row_iter().map(|r| dot(r, &u)).collect();
            let var = population_std(&proj).powi(2);
            assert!(var <= var_best + 1e-10);
        }
    }

    #[test]
    fn power_iteration_agrees_with_dense_solver() {
        for seed in 0..10 {
            let d = 2 + (seed as usize % 9);
            let x = centered(&random_matrix(60, d, seed));
            let dense = dense_top_eigenvector(&covariance(&x));
            let pi = power_iteration(&x, seed);
            assert!(pi.converged, "seed {seed} did not converge");
            let cos = dot(&dense, &pi.direction).abs();
            assert!(cos >= 1.0 - 1e-8, "seed {seed}: cos {cos}");
        }
    }

    #[test]
    fn wide_matrix_uses_power_iteration_deterministically() {
        let m = standardize(&random_matrix(40, 100, 8));
        let a = principal_projection(&m, 3);
        let b = principal_projection(&m, 3);
        assert_eq!(a, b);
        let mean = a.values.iter().sum::<f64>() / 40.0;
        assert!(mean.abs() < 1e-10);
    }
}
