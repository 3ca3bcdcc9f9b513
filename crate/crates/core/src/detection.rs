//! Drop-one-view noisy-view detection and single-view perturbation profiles.
//!
//! A view whose removal does not lower the score (`drop - base >= 0`) is a
//! candidate noisy view; among candidates the largest increase wins, ties
//! going to the smaller index.

use serde_json::{json, Value};

use crate::config::ScoreConfig;
use crate::corruption::{corrupt_view, NoiseMode};
use crate::data::MultiViewDataset;
use crate::error::{MvcsError, Result};
use crate::json::{num, opt_num};
use crate::par;
use crate::rng::derive_seed;
use crate::scoring::score_dataset;

#[derive(Debug, Clone, PartialEq)]
pub struct DetectionResult {
    pub view_names: Vec<String>,
    pub base_score: f64,
    /// Score with view `v` removed.
    pub drop_scores: Vec<f64>,
    /// `drop_scores[v] - base_score`.
    pub deltas: Vec<f64>,
    /// Views with a non-negative delta, ascending.
    pub candidates: Vec<usize>,
    pub detected: Option<usize>,
}

impl DetectionResult {
    pub fn to_json(&self) -> Value {
        let per_view: Vec<Value> = (0..self.view_names.len())
            .map(|v| {
                json!({
                    "view": self.view_names[v],
                    "drop_score": num(self.drop_scores[v]),
                    "delta": num(self.deltas[v]),
                    "candidate": self.candidates.contains(&v),
                })
            })
            .collect();
        json!({
            "base_score": num(self.base_score),
            "per_view": per_view,
            "detected": self.detected.map(|v| self.view_names[v].clone()),
        })
    }
}

/// Drop-one detection driven by the calibrated clusterability score.
pub fn detect_noisy_view(
    dataset: &MultiViewDataset,
    config: &ScoreConfig,
) -> Result<DetectionResult> {
    detect_with(dataset, |ds| Ok(score_dataset(ds, config)?.s_final))
}

/// Drop-one detection driven by an arbitrary score where larger means more
/// clusterable. Drop evaluations run in parallel.
pub fn detect_with<F>(dataset: &MultiViewDataset, score: F) -> Result<DetectionResult>
where
    F: Fn(&MultiViewDataset) -> Result<f64> + Sync + Send,
{
    let v = dataset.n_views();
    if v < 2 {
        return Err(MvcsError::SingleView(v));
    }
    // slot 0 is the full dataset, slot i + 1 drops view i
    let scores = par::try_map_range(v + 1, |slot| {
        if slot == 0 {
            score(dataset)
        } else {
            score(&dataset.without_view(slot - 1)?)
        }
    })?;
    let base_score = scores[0];
    let drop_scores = scores[1..].to_vec();
    Ok(select(
        dataset.view_names().to_vec(),
        base_score,
        drop_scores,
    ))
}

fn select(view_names: Vec<String>, base_score: f64, drop_scores: Vec<f64>) -> DetectionResult {
    let deltas: Vec<f64> = drop_scores.iter().map(|d| d - base_score).collect();
    let candidates: Vec<usize> = (0..deltas.len()).filter(|&v| deltas[v] >= 0.0).collect();
    let mut detected: Option<usize> = None;
    for &c in &candidates {
        if detected.map_or(true, |best| deltas[c] > deltas[best]) {
            detected = Some(c);
        }
    }
    DetectionResult {
        view_names,
        base_score,
        drop_scores,
        deltas,
        candidates,
        detected,
    }
}

/// Scores after removing, permuting or conflict-corrupting one view.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfileRow {
    pub view: String,
    pub drop: f64,
    pub per: f64,
    /// `None` when the dataset has no labels.
    pub con: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationProfile {
    pub base_score: f64,
    pub rows: Vec<ProfileRow>,
    pub labels_missing: bool,
}

impl PerturbationProfile {
    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                json!({
                    "view": r.view,
                    "drop": num(r.drop),
                    "per": num(r.per),
                    "con": opt_num(r.con),
                })
            })
            .collect();
        json!({
            "base_score": num(self.base_score),
            "views": rows,
            "con_skipped": self.labels_missing,
        })
    }
}

/// For every view: score with it dropped, permutation-corrupted and
/// conflict-corrupted. The noise for view `v` uses a sub-seed of `seed`.
/// Without labels the conflict column is skipped.
pub fn perturbation_profile(
    dataset: &MultiViewDataset,
    config: &ScoreConfig,
    seed: u64,
) -> Result<PerturbationProfile> {
    let v = dataset.n_views();
    if v < 2 {
        return Err(MvcsError::SingleView(v));
    }
    let labels_missing = dataset.labels().is_none();
    let score = |ds: &MultiViewDataset| -> Result<f64> { Ok(score_dataset(ds, config)?.s_final) };
    let base_score = score(dataset)?;

    // 3 jobs per view: drop, per, con
    let cells = par::try_map_range(3 * v, |job| -> Result<Option<f64>> {
        let (view, kind) = (job / 3, job % 3);
        let view_seed = derive_seed(seed, view as u64);
        match kind {
            0 => score(&dataset.without_view(view)?).map(Some),
            1 => {
                let noisy = corrupt_view(dataset, view, NoiseMode::Per, view_seed)?;
                score(&dataset.with_view(view, noisy)?).map(Some)
            }
            _ if labels_missing => Ok(None),
            _ => {
                let noisy = corrupt_view(dataset, view, NoiseMode::Con, view_seed)?;
                score(&dataset.with_view(view, noisy)?).map(Some)
            }
        }
    })?;

    let rows = (0..v)
        .map(|view| ProfileRow {
            view: dataset.view_names()[view].clone(),
            drop: cells[3 * view].expect("drop score"),
            per: cells[3 * view + 1].expect("per score"),
            con: cells[3 * view + 2],
        })
        .collect();
    Ok(PerturbationProfile {
        base_score,
        rows,
        labels_missing,
    })
}
