//! Assembly of the multi-view clusterability score.
//!
//! Each view is standardized and projected to 1-D; the critical bandwidth of
//! that projection, relative to its spread, gives the view score
//! `s = 1 - exp(-h_crit / (tau · sigma))`. The same transform on the
//! concatenation of all standardized views gives the joint score. The three
//! components (mean view score, joint score, neighborhood consistency) are
//! mixed linearly and calibrated with `1 - exp(-raw / eta)`.

use serde_json::{json, Value};

use crate::config::ScoreConfig;
use crate::data::{concatenate, MultiViewDataset, ViewMatrix};
use crate::density::critical_bandwidth;
use crate::error::Result;
use crate::json::{num, num_array, opt_num};
use crate::neighborhood::{consistency_from_tables, neighbor_tables};
use crate::par;
use crate::projection::principal_projection;

/// Score of one 1-D projection plus the quantities behind it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthScore {
    pub score: f64,
    pub h_crit: f64,
    pub sigma: f64,
}

/// `1 - exp(-h_crit / (tau · sigma))`, zero for degenerate projections.
pub fn bandwidth_score(h_crit: f64, sigma: f64, tau: f64) -> f64 {
    if sigma == 0.0 || h_crit == 0.0 {
        return 0.0;
    }
    1.0 - (-h_crit / (tau * sigma)).exp()
}

fn projected_score(matrix: &ViewMatrix, config: &ScoreConfig) -> Result<BandwidthScore> {
    let proj = principal_projection(matrix, config.seed);
    if proj.sigma == 0.0 {
        return Ok(BandwidthScore {
            score: 0.0,
            h_crit: 0.0,
            sigma: 0.0,
        });
    }
    let h = critical_bandwidth(&proj.values, config)?.value;
    Ok(BandwidthScore {
        score: bandwidth_score(h, proj.sigma, config.tau),
        h_crit: h,
        sigma: proj.sigma,
    })
}

/// Score of a single standardized view: `(s, h_crit)`.
pub fn per_view_score(view: &ViewMatrix, config: &ScoreConfig) -> Result<(f64, f64)> {
    let s = projected_score(view, config)?;
    Ok((s.score, s.h_crit))
}

fn view_scores(
    standardized: &MultiViewDataset,
    config: &ScoreConfig,
) -> Result<Vec<BandwidthScore>> {
    par::try_map_range(standardized.n_views(), |v| {
        projected_score(standardized.view(v), config)
    })
}

/// Mean summed in ascending order, so it does not depend on view order.
fn mean(xs: &[f64]) -> f64 {
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.iter().sum::<f64>() / xs.len() as f64
}

/// Mean view score over all views (standardizes internally).
pub fn per_view_component(dataset: &MultiViewDataset, config: &ScoreConfig) -> Result<f64> {
    let scores: Vec<f64> = view_scores(&dataset.standardized(), config)?
        .iter()
        .map(|s| s.score)
        .collect();
    Ok(mean(&scores))
}

fn joint_score(standardized: &MultiViewDataset, config: &ScoreConfig) -> Result<BandwidthScore> {
    projected_score(&concatenate(standardized.views())?, config)
}

/// Score of the concatenated standardized views: `(s_joint, h_crit)`.
/// The concatenation is not re-standardized.
pub fn joint_component(dataset: &MultiViewDataset, config: &ScoreConfig) -> Result<(f64, f64)> {
    let s = joint_score(&dataset.standardized(), config)?;
    Ok((s.score, s.h_crit))
}

/// Linear mix of the components and its calibrated value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComposedScore {
    pub s_raw: f64,
    pub s_final: f64,
    /// Weights actually applied, `(alpha, beta, gamma)`.
    pub weights: (f64, f64, f64),
}

/// Mixes the components. Without a neighborhood term (single view) alpha and
/// beta are rescaled to sum to one and gamma drops to zero.
pub fn compose_score(
    s_pv: f64,
    s_joint: f64,
    s_nbr: Option<f64>,
    config: &ScoreConfig,
) -> ComposedScore {
    let weights = match s_nbr {
        Some(_) => (config.alpha, config.beta, config.gamma),
        None => {
            let total = config.alpha + config.beta;
            if total > 0.0 {
                (config.alpha / total, config.beta / total, 0.0)
            } else {
                (0.5, 0.5, 0.0)
            }
        }
    };
    let s_raw = weights.0 * s_pv + weights.1 * s_joint + weights.2 * s_nbr.unwrap_or(0.0);
    ComposedScore {
        s_raw,
        s_final: 1.0 - (-s_raw / config.eta).exp(),
        weights,
    }
}

/// Everything computed for one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct ClusterabilityReport {
    pub view_names: Vec<String>,
    pub per_view_scores: Vec<f64>,
    pub per_view_hcrit: Vec<f64>,
    pub per_view_sigma: Vec<f64>,
    pub s_pv: f64,
    pub s_joint: f64,
    pub joint_hcrit: f64,
    pub joint_sigma: f64,
    /// Absent for single-view datasets.
    pub s_nbr: Option<f64>,
    pub s_raw: f64,
    pub s_final: f64,
    pub weights: (f64, f64, f64),
    pub config: ScoreConfig,
}

impl ClusterabilityReport {
    pub fn to_json(&self) -> Value {
        json!({
            "view_names": self.view_names,
            "per_view_scores": num_array(&self.per_view_scores),
            "per_view_hcrit": num_array(&self.per_view_hcrit),
            "per_view_sigma": num_array(&self.per_view_sigma),
            "s_pv": num(self.s_pv),
            "s_joint": num(self.s_joint),
            "joint_hcrit": num(self.joint_hcrit),
            "joint_sigma": num(self.joint_sigma),
            "s_nbr": opt_num(self.s_nbr),
            "s_raw": num(self.s_raw),
            "s_final": num(self.s_final),
            "weights": {
                "alpha": num(self.weights.0),
                "beta": num(self.weights.1),
                "gamma": num(self.weights.2),
            },
            "config_echo": config_json(&self.config),
        })
    }
}

pub fn config_json(c: &ScoreConfig) -> Value {
    json!({
        "tau": num(c.tau),
        "k": c.k,
        "alpha": num(c.alpha),
        "beta": num(c.beta),
        "gamma": num(c.gamma),
        "eta": num(c.eta),
        "grid_points": c.grid_points,
        "bisect_rel_tol": num(c.bisect_rel_tol),
        "seed": c.seed,
    })
}

/// Full pipeline. Single-view datasets get no neighborhood term and
/// renormalized weights. Deterministic for a given dataset and config.
pub fn score_dataset(
    dataset: &MultiViewDataset,
    config: &ScoreConfig,
) -> Result<ClusterabilityReport> {
    let multi = dataset.n_views() >= 2;
    if multi {
        config.validate_for(dataset.n_instances())?;
    } else {
        config.validate()?;
    }
    let z = dataset.standardized();

    let (views, (joint, nbr)) = par::join(
        || view_scores(&z, config),
        || {
            par::join(
                || joint_score(&z, config),
                || -> Result<Option<f64>> {
                    if !multi {
                        return Ok(None);
                    }
                    let tables = neighbor_tables(&z, config.k)?;
                    Ok(Some(consistency_from_tables(&tables)?.overall))
                },
            )
        },
    );
    let (views, joint, s_nbr) = (views?, joint?, nbr?);

    let per_view_scores: Vec<f64> = views.iter().map(|s| s.score).collect();
    let s_pv = mean(&per_view_scores);
    let composed = compose_score(s_pv, joint.score, s_nbr, config);
    Ok(ClusterabilityReport {
        view_names: dataset.view_names().to_vec(),
        per_view_hcrit: views.iter().map(|s| s.h_crit).collect(),
        per_view_sigma: views.iter().map(|s| s.sigma).collect(),
        per_view_scores,
        s_pv,
        s_joint: joint.score,
        joint_hcrit: joint.h_crit,
        joint_sigma: joint.sigma,
        s_nbr,
        s_raw: composed.s_raw,
        s_final: composed.s_final,
        weights: composed.weights,
        config: *config,
    })
}
