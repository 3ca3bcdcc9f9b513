//! Multi-view dataset model, manifest + CSV storage, standardization and
//! concatenation.
//!
//! On disk a dataset is a JSON manifest
//! `{ "views": [{"name": .., "path": ..}, ..], "labels": "labels.csv" }`
//! pointing at headerless comma-separated view files (one instance per row)
//! and an optional labels file holding one integer class id per line. Paths
//! are resolved relative to the manifest's directory.

use std::collections::{BTreeMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{MvcsError, Result};

/// Dense row-major matrix; row `i` is instance `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ViewMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl ViewMatrix {
    /// Builds a matrix from row-major values. Every entry must be finite.
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(MvcsError::ShapeMismatch(format!(
                "matrix must be non-empty, got {rows}x{cols}"
            )));
        }
        if values.len() != rows * cols {
            return Err(MvcsError::ShapeMismatch(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                values.len()
            )));
        }
        let m = Self { rows, cols, values };
        if let Some((row, col)) = m.first_non_finite() {
            return Err(MvcsError::NonFiniteValue {
                view: String::new(),
                row,
                col,
            });
        }
        Ok(m)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, Vec::len);
        if let Some(bad) = rows.iter().position(|r| r.len() != d) {
            return Err(MvcsError::ShapeMismatch(format!(
                "row {bad} has {} columns, expected {d}",
                rows[bad].len()
            )));
        }
        Self::new(n, d, rows.concat())
    }

    /// Single-column matrix.
    pub fn from_column(values: &[f64]) -> Result<Self> {
        Self::new(values.len(), 1, values.to_vec())
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), rows * cols);
        Self { rows, cols, values }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.cols + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.cols)
    }

    /// Applies `f` to every column, producing a matrix of the same shape.
    pub fn map_columns<F>(&self, mut f: F) -> ViewMatrix
    where
        F: FnMut(usize, &[f64]) -> Vec<f64>,
    {
        let mut out = vec![0.0; self.values.len()];
        for j in 0..self.cols {
            let col = f(j, &self.column(j));
            debug_assert_eq!(col.len(), self.rows);
            for (i, v) in col.into_iter().enumerate() {
                out[i * self.cols + j] = v;
            }
        }
        Self::from_raw(self.rows, self.cols, out)
    }

    fn first_non_finite(&self) -> Option<(usize, usize)> {
        self.values
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols))
    }
}

/// Row-aligned views over the same `N` instances, with optional class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiViewDataset {
    views: Vec<ViewMatrix>,
    view_names: Vec<String>,
    labels: Option<Vec<i64>>,
}

impl MultiViewDataset {
    pub fn new(
        views: Vec<ViewMatrix>,
        view_names: Vec<String>,
        labels: Option<Vec<i64>>,
    ) -> Result<Self> {
        if views.is_empty() {
            return Err(MvcsError::EmptyDataset);
        }
        if views.len() != view_names.len() {
            return Err(MvcsError::InvalidDataset(format!(
                "{} views but {} names",
                views.len(),
                view_names.len()
            )));
        }
        let mut seen = HashSet::new();
        for name in &view_names {
            if !seen.insert(name.as_str()) {
                return Err(MvcsError::InvalidDataset(format!(
                    "duplicate view name '{name}'"
                )));
            }
        }
        let n = views[0].rows();
        for (view, name) in views.iter().zip(&view_names).skip(1) {
            if view.rows() != n {
                return Err(MvcsError::RowCountMismatch {
                    view: name.clone(),
                    expected: n,
                    found: view.rows(),
                });
            }
        }
        if n < 2 {
            return Err(MvcsError::InvalidDataset(format!(
                "need at least 2 instances, got {n}"
            )));
        }
        if let Some(labels) = &labels {
            validate_labels(labels, n)?;
        }
        Ok(Self {
            views,
            view_names,
            labels,
        })
    }

    /// Names views `view_1 .. view_V`.
    pub fn unnamed(views: Vec<ViewMatrix>, labels: Option<Vec<i64>>) -> Result<Self> {
        let names = (1..=views.len()).map(|i| format!("view_{i}")).collect();
        Self::new(views, names, labels)
    }

    pub fn n_instances(&self) -> usize {
        self.views[0].rows()
    }

    pub fn n_views(&self) -> usize {
        self.views.len()
    }

    pub fn views(&self) -> &[ViewMatrix] {
        &self.views
    }

    pub fn view(&self, v: usize) -> &ViewMatrix {
        &self.views[v]
    }

    pub fn view_names(&self) -> &[String] {
        &self.view_names
    }

    pub fn labels(&self) -> Option<&[i64]> {
        self.labels.as_deref()
    }

    /// Dataset with view `v` removed.
    pub fn without_view(&self, v: usize) -> Result<Self> {
        if v >= self.n_views() {
            return Err(MvcsError::InvalidSelection(format!(
                "view index {v} out of range for {} views",
                self.n_views()
            )));
        }
        let keep: Vec<usize> = (0..self.n_views()).filter(|&i| i != v).collect();
        self.select(&keep)
    }

    /// Dataset made of the listed views, in the given order.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        if let Some(&bad) = indices.iter().find(|&&i| i >= self.n_views()) {
            return Err(MvcsError::InvalidSelection(format!(
                "view index {bad} out of range for {} views",
                self.n_views()
            )));
        }
        Self::new(
            indices.iter().map(|&i| self.views[i].clone()).collect(),
            indices
                .iter()
                .map(|&i| self.view_names[i].clone())
                .collect(),
            self.labels.clone(),
        )
    }

    /// Dataset with view `v` swapped for `replacement` (same name).
    pub fn with_view(&self, v: usize, replacement: ViewMatrix) -> Result<Self> {
        if v >= self.n_views() {
            return Err(MvcsError::InvalidSelection(format!(
                "view index {v} out of range for {} views",
                self.n_views()
            )));
        }
        let mut views = self.views.clone();
        views[v] = replacement;
        Self::new(views, self.view_names.clone(), self.labels.clone())
    }

    /// Every view standardized column-wise.
    pub fn standardized(&self) -> Self {
        Self {
            views: self.views.iter().map(standardize).collect(),
            view_names: self.view_names.clone(),
            labels: self.labels.clone(),
        }
    }
}

fn validate_labels(labels: &[i64], n: usize) -> Result<()> {
    if labels.len() != n {
        return Err(MvcsError::InvalidLabels(format!(
            "{} labels for {n} instances",
            labels.len()
        )));
    }
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_default() += 1;
    }
    if let Some((class, _)) = counts.iter().find(|(_, &c)| c < 2) {
        return Err(MvcsError::InvalidLabels(format!(
            "class {class} has fewer than 2 members"
        )));
    }
    Ok(())
}

/// Column-wise z-scoring with the population standard deviation.
/// Constant columns map to zeros.
pub fn standardize(view: &ViewMatrix) -> ViewMatrix {
    let n = view.rows() as f64;
    view.map_columns(|_, col| {
        let (lo, hi) = col
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
                (lo.min(x), hi.max(x))
            });
        if lo == hi {
            return vec![0.0; col.len()];
        }
        let mean = col.iter().sum::<f64>() / n;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd == 0.0 || !sd.is_finite() {
            return vec![0.0; col.len()];
        }
        col.iter().map(|x| (x - mean) / sd).collect()
    })
}

/// Horizontal concatenation of all views, column blocks in view order.
pub fn concatenate_views(dataset: &MultiViewDataset) -> Result<ViewMatrix> {
    concatenate(dataset.views())
}

pub(crate) fn concatenate(views: &[ViewMatrix]) -> Result<ViewMatrix> {
    let first = views.first().ok_or(MvcsError::EmptyDataset)?;
    let n = first.rows();
    let d: usize = views.iter().map(ViewMatrix::cols).sum();
    let mut values = Vec::with_capacity(n * d);
    for i in 0..n {
        for v in views {
            values.extend_from_slice(v.row(i));
        }
    }
    Ok(ViewMatrix::from_raw(n, d, values))
}

// ── Manifest storage ──────────────────────────────────────────────────

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestView {
    pub name: String,
    pub path: String,
}

/// The JSON document describing a dataset on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub views: Vec<ManifestView>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<String>,
    /// How the dataset was produced (corruption or synthesis parameters).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub provenance: Option<serde_json::Value>,
}

impl Manifest {
    pub fn read(path: &Path) -> Result<Self> {
        if !path.is_file() {
            return Err(MvcsError::MissingFile(path.to_path_buf()));
        }
        let text = fs::read_to_string(path).map_err(|source| MvcsError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let manifest: Manifest = serde_json::from_str(&text)
            .map_err(|e| MvcsError::MalformedManifest(format!("{}: {e}", path.display())))?;
        if manifest.views.is_empty() {
            return Err(MvcsError::MalformedManifest(format!(
                "{}: \"views\" is empty",
                path.display()
            )));
        }
        Ok(manifest)
    }
}

fn resolve(base: &Path, p: &str) -> PathBuf {
    let p = Path::new(p);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Loads and validates the dataset described by a manifest file.
pub fn load_dataset(manifest_path: impl AsRef<Path>) -> Result<MultiViewDataset> {
    let manifest_path = manifest_path.as_ref();
    let manifest = Manifest::read(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));

    let mut views = Vec::with_capacity(manifest.views.len());
    let mut names = Vec::with_capacity(manifest.views.len());
    for entry in &manifest.views {
        let view = read_view_csv(&resolve(base, &entry.path), &entry.name)?;
        if let Some(first) = views.first() {
            let first: &ViewMatrix = first;
            if view.rows() != first.rows() {
                return Err(MvcsError::RowCountMismatch {
                    view: entry.name.clone(),
                    expected: first.rows(),
                    found: view.rows(),
                });
            }
        }
        views.push(view);
        names.push(entry.name.clone());
    }
    let labels = manifest
        .labels
        .as_deref()
        .map(|p| read_labels(&resolve(base, p)))
        .transpose()?;
    MultiViewDataset::new(views, names, labels)
}

/// Reads one headerless CSV view file.
pub fn read_view_csv(path: &Path, view_name: &str) -> Result<ViewMatrix> {
    if !path.is_file() {
        return Err(MvcsError::MissingFile(path.to_path_buf()));
    }
    let malformed = |msg: String| MvcsError::MalformedView {
        path: path.to_path_buf(),
        msg,
    };
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| malformed(e.to_string()))?;

    let mut values = Vec::new();
    let mut rows = 0usize;
    let mut cols = 0usize;
    for (i, record) in reader.records().enumerate() {
        let record = record.map_err(|e| malformed(e.to_string()))?;
        if i == 0 {
            cols = record.len();
        }
        for (j, field) in record.iter().enumerate() {
            let x: f64 = field
                .parse()
                .map_err(|_| malformed(format!("row {i}, col {j}: cannot parse '{field}'")))?;
            if !x.is_finite() {
                return Err(MvcsError::NonFiniteValue {
                    view: view_name.to_string(),
                    row: i,
                    col: j,
                });
            }
            values.push(x);
        }
        rows += 1;
    }
    if rows == 0 || cols == 0 {
        return Err(malformed("file holds no data".into()));
    }
    Ok(ViewMatrix::from_raw(rows, cols, values))
}

/// Reads a labels file: one integer class id per line.
pub fn read_labels(path: &Path) -> Result<Vec<i64>> {
    if !path.is_file() {
        return Err(MvcsError::MissingFile(path.to_path_buf()));
    }
    let text = fs::read_to_string(path).map_err(|source| MvcsError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim().parse::<i64>().map_err(|_| {
                MvcsError::InvalidLabels(format!(
                    "{} line {}: '{}' is not an integer",
                    path.display(),
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect()
}

fn write_view_csv(path: &Path, view: &ViewMatrix) -> Result<()> {
    let io_err = |e: csv::Error| MvcsError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    };
    let mut writer = csv::WriterBuilder::new()
        .has_headers(false)
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(io_err)?;
    for row in view.row_iter() {
        // `Display` for f64 is the shortest representation that round-trips.
        writer
            .write_record(row.iter().map(|x| x.to_string()))
            .map_err(io_err)?;
    }
    writer.flush().map_err(|source| MvcsError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Writes `dataset` into `dir` as `manifest.json` plus one CSV per view
/// (`view_1.csv`, ...) and `labels.csv`. Returns the manifest path.
pub fn save_dataset(
    dataset: &MultiViewDataset,
    dir: impl AsRef<Path>,
    provenance: Option<serde_json::Value>,
) -> Result<PathBuf> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|source| MvcsError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut entries = Vec::with_capacity(dataset.n_views());
    for (v, (view, name)) in dataset.views().iter().zip(dataset.view_names()).enumerate() {
        let file = format!("view_{}.csv", v + 1);
        write_view_csv(&dir.join(&file), view)?;
        entries.push(ManifestView {
            name: name.clone(),
            path: file,
        });
    }
    let labels = match dataset.labels() {
        Some(labels) => {
            let mut text = String::with_capacity(labels.len() * 3);
            for l in labels {
                text.push_str(&l.to_string());
                text.push('\n');
            }
            let path = dir.join("labels.csv");
            fs::write(&path, text).map_err(|source| MvcsError::Io { path, source })?;
            Some("labels.csv".to_string())
        }
        None => None,
    };
    let manifest = Manifest {
        views: entries,
        labels,
        provenance,
    };
    let path = dir.join("manifest.json");
    // Round-trip through `Value` so keys come out sorted.
    let value = serde_json::to_value(&manifest).expect("manifest serializes");
    let mut text = serde_json::to_string_pretty(&value).expect("manifest serializes");
    text.push('\n');
    fs::write(&path, text).map_err(|source| MvcsError::Io {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}
