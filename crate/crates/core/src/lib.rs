//! Multi-view clusterability scoring.
//!
//! Quantifies how much cluster structure a multi-view dataset carries before
//! any clustering is run, injects view-level noise for controlled
//! experiments, and flags views whose removal makes the data more
//! clusterable.
//!
//! The score mixes three components:
//! - per-view structure: the critical KDE bandwidth of each view's leading
//!   principal projection, normalized by its spread;
//! - joint structure: the same quantity on the concatenated views;
//! - cross-view neighborhood consistency: overlap of k-nearest-neighbor sets
//!   between views.
//!
//! ```
//! use mvcs::{generate_synthetic, score_dataset, ScoreConfig, SynthSpec};
//!
//! let data = generate_synthetic(&SynthSpec::new(120, 2, 3, vec![4], 8.0, 7)).unwrap();
//! let report = score_dataset(&data, &ScoreConfig::default()).unwrap();
//! assert!(report.s_final > 0.0 && report.s_final < 1.0);
//! ```
//!
//! The `parallel` feature (on by default) runs the data-parallel loops on
//! rayon; without it everything runs sequentially with identical results.

pub mod baselines;
pub mod config;
pub mod corruption;
pub mod data;
pub mod density;
pub mod detection;
pub mod error;
pub mod json;
pub mod neighborhood;
mod par;
pub mod projection;
pub mod rng;
pub mod scoring;

pub use baselines::{default_probe_count, hopkins, hopkins_dataset, HopkinsResult};
pub use config::ScoreConfig;
pub use corruption::{
    corrupt_conflict, corrupt_dataset, corrupt_permutation, generate_synthetic, CorruptionSpec,
    NoiseMode, SynthSpec,
};
pub use data::{
    concatenate_views, load_dataset, save_dataset, standardize, MultiViewDataset, ViewMatrix,
};
pub use density::{critical_bandwidth, kde_eval, mode_count, CriticalBandwidth, KdeSpec};
pub use detection::{
    detect_noisy_view, detect_with, perturbation_profile, DetectionResult, PerturbationProfile,
};
pub use error::{MvcsError, Result};
pub use neighborhood::{
    knn_per_view, neighborhood_consistency, pair_agreement, ConsistencyScore, NeighborTable,
};
pub use projection::{principal_projection, Projection1D};
pub use scoring::{
    compose_score, joint_component, per_view_component, per_view_score, score_dataset,
    ClusterabilityReport,
};
