use mvcs::rng::seeded;
use mvcs::{
    corrupt_dataset, detect_noisy_view, detect_with, generate_synthetic, hopkins_dataset,
    perturbation_profile, CorruptionSpec, MultiViewDataset, NoiseMode, ScoreConfig, SynthSpec,
    ViewMatrix,
};
use rand::Rng;
use rand_distr::StandardNormal;

fn synthetic(seed: u64) -> MultiViewDataset {
    generate_synthetic(&SynthSpec::new(200, 3, 4, vec![6], 10.0, seed)).unwrap()
}

#[test]
fn copies_of_one_view_leave_nothing_to_drop() {
    let ds = synthetic(1);
    let v = ds.view(0).clone();
    let copies = MultiViewDataset::unnamed(vec![v.clone(), v.clone(), v], None).unwrap();
    let r = detect_noisy_view(&copies, &ScoreConfig::default()).unwrap();
    for d in &r.deltas {
        assert!(d.abs() <= 1e-9, "delta {d}");
    }
}

#[test]
fn pure_noise_views_run_to_completion() {
    let mut rng = seeded(5);
    let views: Vec<ViewMatrix> = (0..3)
        .map(|_| {
            let rows: Vec<Vec<f64>> = (0..80)
                .map(|_| (0..4).map(|_| rng.sample(StandardNormal)).collect())
                .collect();
            ViewMatrix::from_rows(&rows).unwrap()
        })
        .collect();
    let ds = MultiViewDataset::unnamed(views, None).unwrap();
    let r = detect_noisy_view(&ds, &ScoreConfig::default()).unwrap();
    assert_eq!(r.deltas.len(), 3);
    assert!(r.deltas.iter().all(|d| d.is_finite()));
    if let Some(v) = r.detected {
        assert!(r.candidates.contains(&v));
    }
}

#[test]
fn repeated_runs_agree() {
    let ds = synthetic(2);
    let cfg = ScoreConfig::default();
    assert_eq!(
        detect_noisy_view(&ds, &cfg).unwrap(),
        detect_noisy_view(&ds, &cfg).unwrap()
    );
    assert_eq!(
        perturbation_profile(&ds, &cfg, 9).unwrap(),
        perturbation_profile(&ds, &cfg, 9).unwrap()
    );
}

#[test]
fn permuted_view_is_flagged() {
    let cfg = ScoreConfig::default();
    let mut hits = 0;
    for seed in 0..6 {
        let noisy = corrupt_dataset(
            &synthetic(seed),
            &CorruptionSpec {
                target_views: vec![2],
                mode: NoiseMode::Per,
                seed,
            },
        )
        .unwrap();
        if detect_noisy_view(&noisy, &cfg).unwrap().detected == Some(2) {
            hits += 1;
        }
    }
    assert!(hits >= 5, "{hits} of 6");
}

#[test]
fn clean_profile_entries_sit_below_the_base_score() {
    let cfg = ScoreConfig::default();
    let mut good = 0;
    let seeds = 5;
    for seed in 0..seeds {
        let p = perturbation_profile(&synthetic(seed), &cfg, seed).unwrap();
        let below = p
            .rows
            .iter()
            .all(|r| r.per <= p.base_score && r.con.unwrap() <= p.base_score);
        if below {
            good += 1;
        }
    }
    assert!(2 * good > seeds, "{good} of {seeds}");
}

#[test]
fn hopkins_can_drive_detection() {
    let ds = synthetic(3);
    let r = detect_with(&ds, |d| Ok(hopkins_dataset(d, None, 3)?.value)).unwrap();
    assert_eq!(r.drop_scores.len(), 3);
    assert!(r.drop_scores.iter().all(|s| (0.0..=1.0).contains(s)));
}
