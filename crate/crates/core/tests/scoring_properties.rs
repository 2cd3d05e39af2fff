use crpsum::simulation::{rng_from_seed, sample_gaussian, GaussianSpec};
use crpsum::{
    crps_gaussian_analytic, CrpsEstimator, GaussianSpec1D, QuantileConfig, SamplePairing, SampleVector,
};
use proptest::prelude::*;

fn estimators() -> Vec<CrpsEstimator> {
    let mut out = vec![CrpsEstimator::EmpiricalCdf];
    for n in [1, 4, 20, 100] {
        out.push(CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::new(n).unwrap(),
        });
    }
    for pairing in [
        SamplePairing::AllPairs,
        SamplePairing::Unbiased,
        SamplePairing::IndependentCopies,
    ] {
        out.push(CrpsEstimator::SampleEstimate { pairing });
    }
    out
}

fn score(est: CrpsEstimator, samples: &[f64], x: f64) -> f64 {
    est.score(&SampleVector::new(samples.to_vec()).unwrap(), x).unwrap()
}

// Multiples of 1/8 below 2^10 keep every intermediate exact.
fn dyadic() -> impl Strategy<Value = f64> {
    (-4096i32..4096).prop_map(|k| k as f64 / 8.0)
}

proptest! {
    #[test]
    fn shift_invariance_on_exact_grid(
        samples in prop::collection::vec(dyadic(), 2..40),
        x in dyadic(),
        shift in -64i32..64,
    ) {
        let c = shift as f64;
        let moved: Vec<f64> = samples.iter().map(|s| s + c).collect();
        for est in estimators() {
            prop_assert_eq!(score(est, &samples, x), score(est, &moved, x + c), "{}", est.label());
        }
    }

    #[test]
    fn shift_invariance_general(
        samples in prop::collection::vec(-100.0f64..100.0, 2..60),
        x in -150.0f64..150.0,
        c in -1e3f64..1e3,
    ) {
        let moved: Vec<f64> = samples.iter().map(|s| s + c).collect();
        for est in estimators() {
            let a = score(est, &samples, x);
            let b = score(est, &moved, x + c);
            // rounding of the shifted inputs is relative to their magnitude
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + c.abs()) * 200.0, "{} {a} {b}", est.label());
        }
    }

    #[test]
    fn scale_equivariance(
        samples in prop::collection::vec(-100.0f64..100.0, 2..60),
        x in -150.0f64..150.0,
        c in 1e-3f64..1e3,
    ) {
        let scaled: Vec<f64> = samples.iter().map(|s| s * c).collect();
        // cancellation can leave a near-zero score, so bound by input magnitude too
        let magnitude = c * samples.iter().chain([&x]).fold(0.0f64, |m, v| m.max(v.abs()));
        for est in estimators() {
            let a = c * score(est, &samples, x);
            let b = score(est, &scaled, x * c);
            prop_assert!((a - b).abs() <= 1e-12 * (a.abs() + magnitude), "{} {a} {b}", est.label());
        }
    }

    // The unbiased and neighbour-pair kernels are not bounded below by 0.
    #[test]
    fn non_negative(
        samples in prop::collection::vec(-1e6f64..1e6, 2..80),
        x in -1e6f64..1e6,
    ) {
        let bounded = estimators().into_iter().filter(|e| {
            !matches!(e, CrpsEstimator::SampleEstimate { pairing } if *pairing != SamplePairing::AllPairs)
        });
        for est in bounded {
            prop_assert!(score(est, &samples, x) >= 0.0, "{}", est.label());
        }
    }

    #[test]
    fn zero_when_samples_equal_observation(c in -1e9f64..1e9, n in 2usize..50) {
        let samples = vec![c; n];
        for est in estimators() {
            prop_assert_eq!(score(est, &samples, c), 0.0, "{}", est.label());
        }
    }
}

#[test]
fn estimators_agree_on_large_standard_normal_sets() {
    let spec = GaussianSpec::new(vec![0.0], vec![vec![1.0]]).unwrap();
    let agreeing = [
        CrpsEstimator::EmpiricalCdf,
        CrpsEstimator::Quantile {
            n_quantiles: QuantileConfig::new(100).unwrap(),
        },
        CrpsEstimator::SampleEstimate {
            pairing: SamplePairing::AllPairs,
        },
    ];
    for (seed, n) in [(1, 1000), (2, 2500), (3, 5000)] {
        let draws: Vec<f64> = sample_gaussian(&spec, n, seed).into_iter().map(|v| v[0]).collect();
        let scores: Vec<f64> = agreeing.iter().map(|e| score(*e, &draws, 0.0)).collect();
        let (lo, hi) = scores
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| (lo.min(*s), hi.max(*s)));
        assert!(hi - lo < 0.01, "n={n}: {scores:?}");
    }
}

#[test]
fn mean_error_shrinks_toward_closed_form() {
    let reference = crps_gaussian_analytic(GaussianSpec1D::standard(), 0.0).unwrap();
    let spec = GaussianSpec::new(vec![0.0], vec![vec![1.0]]).unwrap();
    let mut rng = rng_from_seed(11);
    let rmse = |n: usize, rng: &mut _| {
        let mut sq = 0.0;
        for _ in 0..50 {
            let draws: Vec<f64> = spec.sample_with(rng, n);
            let e = score(CrpsEstimator::EmpiricalCdf, &draws, 0.0) - reference;
            sq += e * e;
        }
        (sq / 50.0).sqrt()
    };
    let small = rmse(200, &mut rng);
    let large = rmse(5000, &mut rng);
    assert!(large < small, "rmse at 5000 ({large}) not below rmse at 200 ({small})");
    assert!(large < 0.01);
}
