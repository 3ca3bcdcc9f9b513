//! Exact k-nearest-neighbor tables and cross-view neighborhood agreement.

use std::cmp::Ordering;

use crate::config::ScoreConfig;
use crate::data::{MultiViewDataset, ViewMatrix};
use crate::error::{MvcsError, Result};
use crate::par;

/// Per-instance neighbor lists for one view. Row `i` holds the `k` nearest
/// other instances, nearest first, distance ties broken by smaller index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    pub view_index: usize,
    pub k: usize,
    neighbors: Vec<usize>,
}

impl NeighborTable {
    pub fn n_instances(&self) -> usize {
        self.neighbors.len() / self.k
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.neighbors[i * self.k..(i + 1) * self.k]
    }
}

/// Cross-view agreement: per-instance `a_i` and their mean.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsistencyScore {
    pub per_instance: Vec<f64>,
    pub overall: f64,
}

/// Brute-force Euclidean kNN with self excluded.
pub fn knn_per_view(view: &ViewMatrix, k: usize) -> Result<NeighborTable> {
    knn_table(view, k, 0)
}

pub(crate) fn knn_table(view: &ViewMatrix, k: usize, view_index: usize) -> Result<NeighborTable> {
    let n = view.rows();
    if k == 0 {
        return Err(MvcsError::InvalidConfig("k must be at least 1".into()));
    }
    if k >= n {
        return Err(MvcsError::KTooLarge { k, n });
    }
    let rows = par::map_range(n, |i| nearest(view, i, k));
    Ok(NeighborTable {
        view_index,
        k,
        neighbors: rows.concat(),
    })
}

fn nearest(view: &ViewMatrix, i: usize, k: usize) -> Vec<usize> {
    let xi = view.row(i);
    let mut cand: Vec<(f64, usize)> = (0..view.rows())
        .filter(|&j| j != i)
        .map(|j| {
            let d2: f64 = xi
                .iter()
                .zip(view.row(j))
                .map(|(a, b)| (a - b) * (a - b))
                .sum();
            (d2, j)
        })
        .collect();
    let by_dist = |a: &(f64, usize), b: &(f64, usize)| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    };
    if k < cand.len() {
        cand.select_nth_unstable_by(k - 1, by_dist);
        cand.truncate(k);
    }
    cand.sort_unstable_by(by_dist);
    cand.into_iter().map(|(_, j)| j).collect()
}

/// Per-instance overlap `|N_i(v) ∩ N_i(u)| / k`.
pub fn pair_agreement(table_v: &NeighborTable, table_u: &NeighborTable) -> Result<Vec<f64>> {
    check_shapes(table_v, table_u)?;
    let k = table_v.k;
    Ok((0..table_v.n_instances())
        .map(|i| overlap(table_v.neighbors(i), table_u.neighbors(i)) as f64 / k as f64)
        .collect())
}

fn check_shapes(table_v: &NeighborTable, table_u: &NeighborTable) -> Result<()> {
    if table_v.k != table_u.k || table_v.n_instances() != table_u.n_instances() {
        return Err(MvcsError::ShapeMismatch(format!(
            "neighbor tables differ: N = {} / {}, k = {} / {}",
            table_v.n_instances(),
            table_u.n_instances(),
            table_v.k,
            table_u.k
        )));
    }
    Ok(())
}

fn overlap(a: &[usize], b: &[usize]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_unstable();
    b.sort_unstable();
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    common
}

/// Mean pairwise neighbor overlap across all view pairs, per instance and
/// overall. Views are used as given (callers standardize first).
pub fn neighborhood_consistency(
    dataset: &MultiViewDataset,
    config: &ScoreConfig,
) -> Result<ConsistencyScore> {
    let tables = neighbor_tables(dataset, config.k)?;
    consistency_from_tables(&tables)
}

pub(crate) fn neighbor_tables(dataset: &MultiViewDataset, k: usize) -> Result<Vec<NeighborTable>> {
    let v = dataset.n_views();
    if v < 2 {
        return Err(MvcsError::SingleView(v));
    }
    let n = dataset.n_instances();
    if k >= n {
        return Err(MvcsError::KTooLarge { k, n });
    }
    par::try_map_range(v, |i| knn_table(dataset.view(i), k, i))
}

pub fn consistency_from_tables(tables: &[NeighborTable]) -> Result<ConsistencyScore> {
    let v = tables.len();
    if v < 2 {
        return Err(MvcsError::SingleView(v));
    }
    let n = tables[0].n_instances();
    let k = tables[0].k;
    // Integer overlap counts keep the result independent of view order.
    let mut common = vec![0usize; n];
    for a in 0..v {
        for b in a + 1..v {
            check_shapes(&tables[a], &tables[b])?;
            for (i, c) in common.iter_mut().enumerate() {
                *c += overlap(tables[a].neighbors(i), tables[b].neighbors(i));
            }
        }
    }
    let denom = (k * v * (v - 1) / 2) as f64;
    let per_instance: Vec<f64> = common.into_iter().map(|c| c as f64 / denom).collect();
    let overall = per_instance.iter().sum::<f64>() / n as f64;
    Ok(ConsistencyScore {
        per_instance,
        overall,
    })
}
