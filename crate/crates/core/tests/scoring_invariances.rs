use mvcs::{
    generate_synthetic, score_dataset, MultiViewDataset, ScoreConfig, SynthSpec, ViewMatrix,
};
use proptest::prelude::*;

fn data(seed: u64) -> MultiViewDataset {
    let mut spec = SynthSpec::new(120, 3, 3, vec![3, 5, 4], 6.0, seed);
    spec.noise = 2.0;
    generate_synthetic(&spec).unwrap()
}

fn rescale(view: &ViewMatrix, factor: impl Fn(usize) -> f64) -> ViewMatrix {
    view.map_columns(|j, col| col.iter().map(|x| x * factor(j)).collect())
}

fn reorder(ds: &MultiViewDataset, order: &[usize]) -> MultiViewDataset {
    MultiViewDataset::new(
        order.iter().map(|&i| ds.view(i).clone()).collect(),
        order.iter().map(|&i| ds.view_names()[i].clone()).collect(),
        ds.labels().map(|l| l.to_vec()),
    )
    .unwrap()
}

#[test]
fn power_of_two_scaling_is_bit_identical() {
    let cfg = ScoreConfig::default();
    for seed in 0..4 {
        let ds = data(seed);
        let base = score_dataset(&ds, &cfg).unwrap();
        let mut scaled = ds.clone();
        for v in 0..3 {
            let view = rescale(ds.view(v), |j| 2f64.powi((j as i32 * 3 + v as i32) % 9 - 4));
            scaled = scaled.with_view(v, view).unwrap();
        }
        let other = score_dataset(&scaled, &cfg).unwrap();
        assert_eq!(base.to_json(), other.to_json());
    }
}

#[test]
fn arbitrary_positive_scaling_is_numerically_invariant() {
    let cfg = ScoreConfig::default();
    let ds = data(11);
    let base = score_dataset(&ds, &cfg).unwrap();
    let mut scaled = ds.clone();
    for v in 0..3 {
        scaled = scaled
            .with_view(v, rescale(ds.view(v), |j| 0.37 + 13.1 * j as f64))
            .unwrap();
    }
    let other = score_dataset(&scaled, &cfg).unwrap();
    assert!((base.s_final - other.s_final).abs() < 1e-6);
    assert_eq!(base.s_nbr, other.s_nbr);
}

#[test]
fn view_order_only_moves_the_joint_score_by_rounding() {
    let cfg = ScoreConfig::default();
    for seed in 0..3 {
        let ds = data(seed);
        let base = score_dataset(&ds, &cfg).unwrap();
        for order in [[2, 0, 1], [1, 2, 0], [2, 1, 0]] {
            let r = score_dataset(&reorder(&ds, &order), &cfg).unwrap();
            assert_eq!(base.s_pv, r.s_pv);
            assert_eq!(base.s_nbr, r.s_nbr);
            assert!((base.s_joint - r.s_joint).abs() <= 1e-8);
            assert!((base.s_final - r.s_final).abs() <= 1e-8);
            for (k, &i) in order.iter().enumerate() {
                assert_eq!(r.per_view_scores[k], base.per_view_scores[i]);
            }
        }
    }
}

#[test]
fn duplicated_views_keep_per_view_mean_and_full_agreement() {
    let cfg = ScoreConfig::default();
    let ds = data(5);
    let one = MultiViewDataset::unnamed(vec![ds.view(0).clone()], None).unwrap();
    let twice =
        MultiViewDataset::unnamed(vec![ds.view(0).clone(), ds.view(0).clone()], None).unwrap();
    let a = score_dataset(&one, &cfg).unwrap();
    let b = score_dataset(&twice, &cfg).unwrap();
    assert_eq!(a.s_pv, b.s_pv);
    assert_eq!(b.s_nbr, Some(1.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn report_fields_stay_in_range(seed in 0u64..1_000, tau in 0.25f64..4.0, eta in 0.1f64..2.0) {
        let cfg = ScoreConfig { tau, eta, ..ScoreConfig::default() };
        let r = score_dataset(&data(seed), &cfg).unwrap();
        for &s in &r.per_view_scores {
            prop_assert!((0.0..1.0).contains(&s));
        }
        prop_assert!((0.0..1.0).contains(&r.s_joint));
        prop_assert!((0.0..=1.0).contains(&r.s_nbr.unwrap()));
        prop_assert!(r.s_raw >= 0.0 && r.s_raw <= 1.0);
        prop_assert!((0.0..1.0).contains(&r.s_final));
        prop_assert!((r.s_final - (1.0 - (-r.s_raw / eta).exp())).abs() < 1e-15);
    }
}
