use crpsum::simulation::rng_from_seed;
use crpsum::{
    crps_per_dimension, crps_sample_estimate, crps_sum, energy_score, score_report, CrpsEstimator,
    ForecastEnsemble, Normalization, ObservationWindow, QuantileConfig, SamplePairing, SampleVector,
    ScoringConfig,
};
use proptest::prelude::*;
use rand::Rng;

fn estimators() -> [CrpsEstimator; 3] {
    [
        CrpsEstimator::EmpiricalCdf,
        CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::default(),
        },
        CrpsEstimator::SampleEstimate {
            pairing: SamplePairing::AllPairs,
        },
    ]
}

/// (S, H, D, ensemble values, observation values)
fn instance() -> impl Strategy<Value = (usize, usize, usize, Vec<f64>, Vec<f64>)> {
    (2usize..12, 1usize..4, 1usize..4).prop_flat_map(|(s, h, d)| {
        (
            Just(s),
            Just(h),
            Just(d),
            prop::collection::vec(-10.0f64..10.0, s * h * d),
            prop::collection::vec(-10.0f64..10.0, h * d),
        )
    })
}

fn build(s: usize, h: usize, d: usize, ens: Vec<f64>, obs: Vec<f64>) -> (ForecastEnsemble, ObservationWindow) {
    (
        ForecastEnsemble::new(s, h, d, ens).unwrap(),
        ObservationWindow::new(h, d, obs).unwrap(),
    )
}

fn permute_dims(ens: &ForecastEnsemble, obs: &ObservationWindow, perm: &[usize]) -> (ForecastEnsemble, ObservationWindow) {
    let (s, h, d) = (ens.n_samples(), ens.horizon(), ens.dims());
    let mut e = Vec::with_capacity(s * h * d);
    for i in 0..s {
        for t in 0..h {
            e.extend(perm.iter().map(|&k| ens.get(i, t, k)));
        }
    }
    let mut o = Vec::with_capacity(h * d);
    for t in 0..h {
        o.extend(perm.iter().map(|&k| obs.get(t, k)));
    }
    build(s, h, d, e, o)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1.0)
}

proptest! {
    #[test]
    fn es_matches_crps_in_one_dimension(
        samples in prop::collection::vec(-1e4f64..1e4, 2..100),
        x in -1e4f64..1e4,
    ) {
        let es = energy_score(&samples, 1, &[x], 1.0).unwrap();
        let crps = crps_sample_estimate(&SampleVector::new(samples).unwrap(), x).unwrap();
        prop_assert!((es - crps).abs() <= 1e-12 * crps.abs().max(1e-300), "{es} {crps}");
    }

    #[test]
    fn dimension_permutation_invariance((s, h, d, e, o) in instance(), seed in any::<u64>()) {
        let (ens, obs) = build(s, h, d, e, o);
        let mut perm: Vec<usize> = (0..d).collect();
        let mut rng = rng_from_seed(seed);
        for i in (1..d).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let (pe, po) = permute_dims(&ens, &obs, &perm);
        for est in estimators() {
            prop_assert!(close(crps_sum(&ens, &obs, est).unwrap(), crps_sum(&pe, &po, est).unwrap()));
        }
        for t in 0..h {
            let a = energy_score(&ens.step(t), d, obs.row(t), 1.0).unwrap();
            let b = energy_score(&pe.step(t), d, po.row(t), 1.0).unwrap();
            prop_assert!(close(a, b), "{a} {b}");
        }
    }

    #[test]
    fn sample_permutation_invariance((s, h, d, e, o) in instance(), seed in any::<u64>()) {
        let (ens, obs) = build(s, h, d, e.clone(), o.clone());
        let mut order: Vec<usize> = (0..s).collect();
        let mut rng = rng_from_seed(seed);
        for i in (1..s).rev() {
            order.swap(i, rng.random_range(0..=i));
        }
        let block = h * d;
        let shuffled: Vec<f64> = order.iter().flat_map(|&i| e[i * block..(i + 1) * block].to_vec()).collect();
        let (se, so) = build(s, h, d, shuffled, o);
        for est in estimators() {
            let cfg = ScoringConfig { estimator: est, ..ScoringConfig::default() };
            let a = score_report(&ens, &obs, &cfg).unwrap();
            let b = score_report(&se, &so, &cfg).unwrap();
            prop_assert!(close(a.crps_sum(), b.crps_sum()));
            prop_assert!(close(a.crps_aggregate(), b.crps_aggregate()));
            prop_assert!(close(a.energy_score(), b.energy_score()));
        }
    }

    #[test]
    fn reported_scores_non_negative((s, h, d, e, o) in instance(), beta in 0.05f64..1.95) {
        let (ens, obs) = build(s, h, d, e, o);
        for est in estimators() {
            let cfg = ScoringConfig { estimator: est, beta, ..ScoringConfig::default() };
            let r = score_report(&ens, &obs, &cfg).unwrap();
            prop_assert!(r.crps_sum() >= 0.0 && r.crps_aggregate() >= 0.0 && r.energy_score() >= 0.0);
            prop_assert!(r.crps_per_dim().iter().all(|v| *v >= 0.0));
        }
    }

    // Sums equal to a shared per-step value leave nothing for CRPS-Sum to see.
    // Values are multiples of 1/8 so the fixed coordinate sums back exactly.
    #[test]
    fn crps_sum_blind_to_shared_totals(
        (s, h, d, e, o) in (2usize..12, 1usize..4, 2usize..5).prop_flat_map(|(s, h, d)| {
            let eighths = (-80i32..80).prop_map(|k| k as f64 / 8.0);
            (
                Just(s),
                Just(h),
                Just(d),
                prop::collection::vec(eighths.clone(), s * h * d),
                prop::collection::vec(eighths, h * d),
            )
        }),
        totals in prop::collection::vec((-32i32..32).prop_map(|k| k as f64 / 8.0), 3),
    ) {
        let fix = |row: &mut [f64], target: f64| {
            let (head, last) = row.split_at_mut(d - 1);
            last[0] = target - head.iter().sum::<f64>();
        };
        let (mut e, mut o) = (e, o);
        for (k, row) in e.chunks_exact_mut(d).enumerate() {
            fix(row, totals[k % h]);
        }
        for (t, row) in o.chunks_exact_mut(d).enumerate() {
            fix(row, totals[t]);
        }
        let (ens, obs) = build(s, h, d, e, o);
        for est in estimators() {
            prop_assert_eq!(crps_sum(&ens, &obs, est).unwrap(), 0.0);
        }
    }
}

/// Scores the summed series directly with the univariate estimator.
fn crps_sum_oracle(paths: &[Vec<Vec<f64>>], obs: &[Vec<f64>], est: CrpsEstimator) -> f64 {
    let h = obs.len();
    let mut total = 0.0;
    for t in 0..h {
        let summed: Vec<f64> = paths.iter().map(|p| p[t].iter().sum()).collect();
        let target: f64 = obs[t].iter().sum();
        total += est.score(&SampleVector::new(summed).unwrap(), target).unwrap();
    }
    total / h as f64
}

#[test]
fn crps_sum_matches_brute_force_composition() {
    let (s, h, d) = (512, 4, 3);
    let mut rng = rng_from_seed(512);
    let paths: Vec<Vec<Vec<f64>>> = (0..s)
        .map(|_| (0..h).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect())
        .collect();
    let obs: Vec<Vec<f64>> = (0..h).map(|_| (0..d).map(|_| rng.random_range(-3.0..3.0)).collect()).collect();
    let ens = ForecastEnsemble::from_nested(&paths).unwrap();
    let window = ObservationWindow::from_rows(&obs).unwrap();
    for est in estimators() {
        let got = crps_sum(&ens, &window, est).unwrap();
        let want = crps_sum_oracle(&paths, &obs, est);
        assert!((got - want).abs() < 1e-12, "{}: {got} vs {want}", est.label());
    }
}

#[test]
fn one_dimension_reduces_to_plain_crps() {
    let mut rng = rng_from_seed(9);
    let (s, h) = (64, 5);
    let e: Vec<f64> = (0..s * h).map(|_| rng.random_range(-2.0..2.0)).collect();
    let o: Vec<f64> = (0..h).map(|_| rng.random_range(-2.0..2.0)).collect();
    let (ens, obs) = build(s, h, 1, e, o);
    for est in estimators() {
        let per_dim = crps_per_dimension(&ens, &obs, est, Normalization::Raw).unwrap();
        let sum = crps_sum(&ens, &obs, est).unwrap();
        assert!(close(per_dim.aggregate, sum));
        assert!(close(per_dim.per_dim[0], sum));
    }
}

#[test]
fn perfect_forecast_scores_zero_everywhere() {
    let obs_rows = vec![vec![1.5, -2.0, 0.25], vec![3.0, 0.0, -1.0]];
    let paths = vec![obs_rows.clone(); 10];
    let ens = ForecastEnsemble::from_nested(&paths).unwrap();
    let obs = ObservationWindow::from_rows(&obs_rows).unwrap();
    for norm in [Normalization::Raw, Normalization::Target] {
        let cfg = ScoringConfig {
            normalization: norm,
            ..ScoringConfig::default()
        };
        let r = score_report(&ens, &obs, &cfg).unwrap();
        assert_eq!((r.crps_sum(), r.crps_aggregate(), r.energy_score()), (0.0, 0.0, 0.0));
        assert!(r.crps_per_dim().iter().all(|v| *v == 0.0));
    }
}
