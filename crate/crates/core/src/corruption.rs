//! View-level noise injection and a synthetic multi-view generator.
//!
//! Two kinds of noisy view:
//! - permutation noise shuffles every column independently, keeping each
//!   feature's marginal distribution and destroying the joint structure;
//! - conflict noise re-draws every instance from the per-class Gaussian of a
//!   class other than its own, giving the view a cluster structure that
//!   contradicts the true one.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::data::{MultiViewDataset, ViewMatrix};
use crate::error::{MvcsError, Result};
use crate::json::num;
use crate::rng::{self, derive_seed};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseMode {
    /// Column-wise row permutation.
    Per,
    /// Class-conflicting regeneration.
    Con,
}

impl fmt::Display for NoiseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NoiseMode::Per => "per",
            NoiseMode::Con => "con",
        })
    }
}

impl FromStr for NoiseMode {
    type Err = MvcsError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "per" => Ok(NoiseMode::Per),
            "con" => Ok(NoiseMode::Con),
            other => Err(MvcsError::InvalidSelection(format!(
                "unknown noise mode '{other}' (expected per or con)"
            ))),
        }
    }
}

/// Which views to corrupt and how. View indices are 0-based.
#[derive(Debug, Clone, PartialEq)]
pub struct CorruptionSpec {
    pub target_views: Vec<usize>,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl CorruptionSpec {
    pub fn validate(&self, dataset: &MultiViewDataset) -> Result<()> {
        if self.target_views.is_empty() {
            return Err(MvcsError::InvalidSelection("no target views".into()));
        }
        if let Some(&bad) = self.target_views.iter().find(|&&v| v >= dataset.n_views()) {
            return Err(MvcsError::InvalidSelection(format!(
                "view index {bad} out of range for {} views",
                dataset.n_views()
            )));
        }
        if self.mode == NoiseMode::Con && dataset.labels().is_none() {
            return Err(MvcsError::MissingLabels);
        }
        Ok(())
    }

    /// Manifest `provenance` record: mode, target view names, seed.
    pub fn provenance(&self, dataset: &MultiViewDataset) -> Value {
        let targets: Vec<&str> = self
            .target_views
            .iter()
            .map(|&v| dataset.view_names()[v].as_str())
            .collect();
        json!({ "mode": self.mode.to_string(), "targets": targets, "seed": self.seed })
    }
}

/// Shuffles each column with its own permutation.
pub fn corrupt_permutation(view: &ViewMatrix, seed: u64) -> ViewMatrix {
    let mut rng = rng::seeded(seed);
    view.map_columns(|_, col| {
        let mut col = col.to_vec();
        col.shuffle(&mut rng);
        col
    })
}

/// Conflict noise together with the class each instance was drawn from.
#[derive(Debug, Clone, PartialEq)]
pub struct ConflictNoise {
    pub view: ViewMatrix,
    pub assigned: Vec<i64>,
}

/// Regenerates every instance from the Gaussian of another class.
pub fn corrupt_conflict(view: &ViewMatrix, labels: &[i64], seed: u64) -> Result<ViewMatrix> {
    Ok(corrupt_conflict_detailed(view, labels, seed)?.view)
}

pub fn corrupt_conflict_detailed(
    view: &ViewMatrix,
    labels: &[i64],
    seed: u64,
) -> Result<ConflictNoise> {
    let n = view.rows();
    if labels.len() != n {
        return Err(MvcsError::InvalidLabels(format!(
            "{} labels for {n} instances",
            labels.len()
        )));
    }
    let stats = class_stats(view, labels);
    if let Some((class, s)) = stats.iter().find(|(_, s)| s.count < 2) {
        return Err(MvcsError::InvalidLabels(format!(
            "class {class} has {} member(s), need at least 2",
            s.count
        )));
    }
    let mut rng = rng::seeded(seed);
    let assigned = reassign_classes(labels, &mut rng)?;

    let d = view.cols();
    let mut values = Vec::with_capacity(n * d);
    for &c in &assigned {
        let s = &stats[&c];
        for j in 0..d {
            let z: f64 = StandardNormal.sample(&mut rng);
            values.push(s.mean[j] + s.std[j] * z);
        }
    }
    Ok(ConflictNoise {
        view: ViewMatrix::new(n, d, values)?,
        assigned,
    })
}

struct ClassStats {
    count: usize,
    mean: Vec<f64>,
    std: Vec<f64>,
}

fn class_stats(view: &ViewMatrix, labels: &[i64]) -> BTreeMap<i64, ClassStats> {
    let d = view.cols();
    let mut members: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        members.entry(l).or_default().push(i);
    }
    members
        .into_iter()
        .map(|(class, idx)| {
            let cnt = idx.len() as f64;
            let mean: Vec<f64> = (0..d)
                .map(|j| idx.iter().map(|&i| view.get(i, j)).sum::<f64>() / cnt)
                .collect();
            let std: Vec<f64> = (0..d)
                .map(|j| {
                    let var = idx
                        .iter()
                        .map(|&i| (view.get(i, j) - mean[j]).powi(2))
                        .sum::<f64>()
                        / cnt;
                    var.sqrt()
                })
                .collect();
            (
                class,
                ClassStats {
                    count: idx.len(),
                    mean,
                    std,
                },
            )
        })
        .collect()
}

/// Gives every instance a class different from its own.
///
/// When no class holds more than half the instances this is a derangement of
/// the label vector (class sizes preserved): a random shuffle followed by
/// swap repairs. Otherwise each instance picks uniformly among the other
/// classes.
pub fn reassign_classes(labels: &[i64], rng: &mut rng::Rng) -> Result<Vec<i64>> {
    let n = labels.len();
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    if counts.len() < 2 {
        return Err(MvcsError::DerangementImpossible(
            "fewer than two classes".into(),
        ));
    }
    let largest = counts.values().copied().max().unwrap_or(0);
    if 2 * largest > n {
        let classes: Vec<i64> = counts.keys().copied().collect();
        return Ok(labels
            .iter()
            .map(|&l| {
                let others: Vec<i64> = classes.iter().copied().filter(|&c| c != l).collect();
                others[rng.random_range(0..others.len())]
            })
            .collect());
    }

    let mut assigned = labels.to_vec();
    assigned.shuffle(rng);
    for i in 0..n {
        if assigned[i] != labels[i] {
            continue;
        }
        let c = labels[i];
        let start = rng.random_range(0..n);
        let j = (0..n)
            .map(|o| (start + o) % n)
            .find(|&j| assigned[j] != c && labels[j] != c)
            .expect("a swap partner exists when no class exceeds half");
        assigned.swap(i, j);
    }
    Ok(assigned)
}

/// Replaces the target views of `dataset` with noisy versions. Each target
/// uses its own sub-seed derived from `spec.seed` and the view index.
pub fn corrupt_dataset(
    dataset: &MultiViewDataset,
    spec: &CorruptionSpec,
) -> Result<MultiViewDataset> {
    spec.validate(dataset)?;
    let mut out = dataset.clone();
    for &v in &spec.target_views {
        let seed = derive_seed(spec.seed, v as u64);
        let noisy = corrupt_view(dataset, v, spec.mode, seed)?;
        out = out.with_view(v, noisy)?;
    }
    Ok(out)
}

/// Noisy version of view `v`.
pub fn corrupt_view(
    dataset: &MultiViewDataset,
    v: usize,
    mode: NoiseMode,
    seed: u64,
) -> Result<ViewMatrix> {
    let view = dataset.view(v);
    match mode {
        NoiseMode::Per => Ok(corrupt_permutation(view, seed)),
        NoiseMode::Con => {
            let labels = dataset.labels().ok_or(MvcsError::MissingLabels)?;
            corrupt_conflict(view, labels, seed)
        }
    }
}

// ── Synthetic data ────────────────────────────────────────────────────

/// Parameters of the synthetic Gaussian-blob generator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthSpec {
    pub n: usize,
    /// Number of views.
    pub v: usize,
    pub clusters: usize,
    /// Feature count of each view; a single entry is reused for every view.
    pub dims: Vec<usize>,
    /// Distance between the closest pair of cluster centers within a view.
    pub separation: f64,
    /// Within-cluster standard deviation of every feature.
    pub noise: f64,
    pub seed: u64,
}

impl SynthSpec {
    pub const DEFAULT_NOISE: f64 = 8.0;

    pub fn new(
        n: usize,
        v: usize,
        clusters: usize,
        dims: Vec<usize>,
        separation: f64,
        seed: u64,
    ) -> Self {
        Self {
            n,
            v,
            clusters,
            dims,
            separation,
            noise: Self::DEFAULT_NOISE,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(MvcsError::InvalidSpec(m));
        if self.v == 0 {
            return bad("need at least one view".into());
        }
        if self.clusters == 0 {
            return bad("need at least one cluster".into());
        }
        if self.n < 2 * self.clusters {
            return bad(format!(
                "n = {} must be at least 2 x clusters = {}",
                self.n,
                2 * self.clusters
            ));
        }
        if self.dims.len() != 1 && self.dims.len() != self.v {
            return bad(format!(
                "dims lists {} entries for {} views",
                self.dims.len(),
                self.v
            ));
        }
        if self.dims.contains(&0) {
            return bad("every view needs at least one feature".into());
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return bad(format!(
                "separation must be non-negative, got {}",
                self.separation
            ));
        }
        if !(self.noise.is_finite() && self.noise > 0.0) {
            return bad(format!("noise must be positive, got {}", self.noise));
        }
        Ok(())
    }

    pub fn dim(&self, view: usize) -> usize {
        if self.dims.len() == 1 {
            self.dims[0]
        } else {
            self.dims[view]
        }
    }

    pub fn provenance(&self) -> Value {
        json!({
            "mode": "synth",
            "n": self.n,
            "v": self.v,
            "clusters": self.clusters,
            "dims": self.dims,
            "separation": num(self.separation),
            "noise": num(self.noise),
            "seed": self.seed,
        })
    }
}

/// Balanced Gaussian blobs sharing one cluster assignment across views.
///
/// Cluster centers follow a binary hierarchy over `B = ceil(log2 clusters)`
/// bits: bit `b` (most significant first) moves the center by
/// `±separation · 2^(B-2-b)` along the `b`-th of a set of random orthonormal
/// directions drawn per view, so the finest split is `separation` wide and
/// each coarser split doubles it. The top split therefore
/// dominates every view's leading direction while lower splits stay visible
/// to neighborhood structure. Every feature gets independent
/// `N(0, noise²)` within-cluster noise; labels are the cluster ids.
pub fn generate_synthetic(spec: &SynthSpec) -> Result<MultiViewDataset> {
    spec.validate()?;
    let mut rng = rng::seeded(spec.seed);
    let mut labels: Vec<i64> = (0..spec.n).map(|i| (i % spec.clusters) as i64).collect();
    labels.shuffle(&mut rng);

    let bits = usize::BITS - (spec.clusters - 1).leading_zeros();
    let centers: Vec<Vec<f64>> = (0..spec.clusters)
        .map(|c| {
            (0..bits as usize)
                .map(|b| {
                    let bit = (c >> (bits as usize - 1 - b)) & 1;
                    let sign = if bit == 1 { 1.0 } else { -1.0 };
                    sign * spec.separation * 0.5 * (1u64 << (bits as usize - 1 - b)) as f64
                })
                .collect()
        })
        .collect();

    let mut views = Vec::with_capacity(spec.v);
    for v in 0..spec.v {
        let d = spec.dim(v);
        let mut vrng = rng::seeded(derive_seed(spec.seed, 1 + v as u64));
        let basis = random_orthonormal(d, bits as usize, &mut vrng);
        let mut values = Vec::with_capacity(spec.n * d);
        for &c in &labels {
            let mut row = vec![0.0; d];
            for (coef, dir) in centers[c as usize].iter().zip(&basis) {
                for (r, u) in row.iter_mut().zip(dir) {
                    *r += coef * u;
                }
            }
            for r in &mut row {
                let z: f64 = StandardNormal.sample(&mut vrng);
                *r += spec.noise * z;
            }
            values.extend(row);
        }
        views.push(ViewMatrix::new(spec.n, d, values)?);
    }
    MultiViewDataset::unnamed(views, Some(labels))
}

/// Up to `count` orthonormal directions in `R^d` (Gram-Schmidt on Gaussian
/// draws); fewer when `d < count`.
fn random_orthonormal(d: usize, count: usize, rng: &mut rng::Rng) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    while basis.len() < count.min(d) {
        let mut v: Vec<f64> = (0..d).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let p: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= p * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            v.iter_mut().for_each(|x| *x /= norm);
            basis.push(v);
        }
    }
    basis
}
