//! Invariants that hold for any input, checked on random instances.

mod common;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use tiltbench::classifier::{fit_logistic, TrainingSpec};
use tiltbench::dataset::split_indices;
use tiltbench::estimators::{estimate, gamma_log_odds, importance_weight, propensity_r};
use tiltbench::tilt::{constraint_gn, exponentiated_gradient};
use tiltbench::{
    load_csv, save_csv, split_dataset, Estimand, FeatureMap, LogisticModel, MeanFunctional, Method, PiR,
    ProbClassifier, TiltFitConfig,
};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn csv_roundtrip_is_exact(seed in any::<u64>(), n in 2usize..40, dim in 1usize..4) {
        let ds = common::random_dataset(&mut common::rng(seed), n, dim);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("d.csv");
        save_csv(&ds, &path).unwrap();
        prop_assert_eq!(load_csv(&path).unwrap(), ds);
    }

    #[test]
    fn split_is_a_deterministic_partition(n in 2usize..300, frac in 0.05f64..0.95, seed in any::<u64>()) {
        let (a, b) = split_indices(n, frac, seed).unwrap();
        let expected = ((frac * n as f64).floor() as usize).clamp(1, n - 1);
        prop_assert_eq!(a.len(), expected);
        let mut all: Vec<usize> = a.iter().chain(&b).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(split_indices(n, frac, seed).unwrap(), (a, b));
    }

    #[test]
    fn split_datasets_keep_rows(seed in any::<u64>(), n in 2usize..60) {
        let ds = common::random_dataset(&mut common::rng(seed), n, 2);
        let (a, b) = split_dataset(&ds, 0.5, seed).unwrap();
        let (ia, ib) = split_indices(n, 0.5, seed).unwrap();
        prop_assert_eq!(a, ds.subset(&ia).unwrap());
        prop_assert_eq!(b, ds.subset(&ib).unwrap());
    }

    #[test]
    fn weighting_and_propensity_forms_agree(seed in any::<u64>(), n in 4usize..80) {
        let mut r = common::rng(seed);
        let ds = common::random_dataset(&mut r, n, 2);
        let theta = common::random_theta(&mut r, 2, 0.7);
        let fm = FeatureMap::identity(2).unwrap();
        let c = r.random_range(-2.0..2.0);
        for tau in [MeanFunctional::outcome(), MeanFunctional::new("lin", move |x: &[f64]| c * x[0], move |x: &[f64]| c * x[0] + 1.0)] {
            for estimand in [Estimand::Mu, Estimand::Mu0] {
                let iw = estimate(&ds, estimand, Method::Iw, &theta, None, &fm, &tau).unwrap().point;
                let ipw = estimate(&ds, estimand, Method::Ipw, &theta, None, &fm, &tau).unwrap().point;
                prop_assert!(close(iw, ipw, 1e-10), "{} vs {}", iw, ipw);
            }
        }
    }

    #[test]
    fn estimators_ignore_row_order(seed in any::<u64>(), n in 4usize..60) {
        let mut r = common::rng(seed);
        let ds = common::random_dataset(&mut r, n, 2);
        let theta = common::random_theta(&mut r, 2, 0.5);
        let fm = FeatureMap::identity(2).unwrap();
        let eta = LogisticModel::new(fm.clone(), 0.3, vec![0.5, -0.2], 0.0).unwrap();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut r);
        let shuffled = ds.subset(&perm).unwrap();
        let tau = MeanFunctional::outcome();
        for estimand in [Estimand::Mu, Estimand::Mu0] {
            for method in [Method::Iw, Method::Ipw, Method::Dr, Method::Or] {
                let eta: Option<&dyn ProbClassifier> = Some(&eta);
                let a = estimate(&ds, estimand, method, &theta, eta, &fm, &tau).unwrap().point;
                let b = estimate(&shuffled, estimand, method, &theta, eta, &fm, &tau).unwrap().point;
                prop_assert!(close(a, b, 1e-12), "{:?} {:?}: {} vs {}", estimand, method, a, b);
            }
        }
    }

    #[test]
    fn constraint_is_above_minus_one(seed in any::<u64>(), n in 2usize..60, scale in 0.0f64..5.0) {
        let mut r = common::rng(seed);
        let ds = common::random_dataset(&mut r, n, 2);
        let theta = common::random_theta(&mut r, 2, scale);
        let probs = common::random_probs(&mut r, n);
        let g = constraint_gn(&theta, &ds, &probs, &FeatureMap::identity(2).unwrap()).unwrap();
        prop_assert!(g > -1.0);
    }

    #[test]
    fn gamma_is_the_log_weight_difference(seed in any::<u64>(), x0 in -3.0f64..3.0, x1 in -3.0f64..3.0) {
        let mut r = common::rng(seed);
        let fm = FeatureMap::polynomial(2, 2).unwrap();
        let theta = common::random_theta(&mut r, fm.output_dim(), 0.3);
        let x = [x0, x1];
        let g = gamma_log_odds(&theta, &fm, &x).unwrap();
        let w1 = importance_weight(&theta, &fm, &x, true).unwrap();
        let w0 = importance_weight(&theta, &fm, &x, false).unwrap();
        prop_assert!(close(g, w1.ln() - w0.ln(), 1e-12));
    }

    #[test]
    fn unit_functional_weighting_matches_constraint(seed in any::<u64>(), n in 2usize..80) {
        // With eta at the observed labels (nudged into the open interval) the
        // constraint's mixture collapses to the realised weight.
        let mut r = common::rng(seed);
        let ds = common::random_dataset(&mut r, n, 2);
        let theta = common::random_theta(&mut r, 2, 0.7);
        let fm = FeatureMap::identity(2).unwrap();
        let labels: Vec<f64> = ds.outcomes().iter().map(|&y| if y { 1.0 - 1e-15 } else { 1e-15 }).collect();
        let g = constraint_gn(&theta, &ds, &labels, &fm).unwrap();
        let iw = estimate(&ds, Estimand::Mu0, Method::Iw, &theta, None, &fm, &MeanFunctional::constant(1.0)).unwrap().point;
        prop_assert!(close(iw, 1.0 + g, 1e-12), "{} vs {}", iw, 1.0 + g);
    }

    #[test]
    fn degree_one_polynomial_is_identity(dim in 1usize..6, seed in any::<u64>()) {
        let mut r = common::rng(seed);
        let x: Vec<f64> = (0..dim).map(|_| r.random_range(-10.0..10.0)).collect();
        let p = FeatureMap::polynomial(dim, 1).unwrap();
        let id = FeatureMap::identity(dim).unwrap();
        prop_assert_eq!(p.output_dim(), dim);
        prop_assert_eq!(p.apply(&x).unwrap(), id.apply(&x).unwrap());
    }

    #[test]
    fn propensity_matches_weight_odds(seed in any::<u64>(), pi in 0.05f64..0.95, y in any::<bool>()) {
        let mut r = common::rng(seed);
        let fm = FeatureMap::identity(3).unwrap();
        let theta = common::random_theta(&mut r, 3, 0.5);
        let x: Vec<f64> = (0..3).map(|_| r.random_range(-2.0..2.0)).collect();
        let prop = propensity_r(&theta, &fm, PiR::new(pi).unwrap(), &x, y).unwrap();
        let w = importance_weight(&theta, &fm, &x, y).unwrap();
        prop_assert!(close(1.0 / prop - 1.0, w * (1.0 - pi) / pi, 1e-10));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn weight_scale_leaves_the_minimizer(seed in any::<u64>(), c in 0.1f64..20.0) {
        let mut r = common::rng(seed);
        let n = 80;
        let x: Vec<f64> = (0..2 * n).map(|_| r.random_range(-2.0..2.0)).collect();
        let y: Vec<bool> = x.chunks(2).map(|v| v[0] - v[1] + r.random_range(-1.5..1.5) > 0.0).collect();
        let w: Vec<f64> = (0..n).map(|_| r.random_range(0.1..3.0)).collect();
        let cw: Vec<f64> = w.iter().map(|v| c * v).collect();
        let fm = FeatureMap::identity(2).unwrap();
        let spec = |w: Vec<f64>| TrainingSpec { weights: Some(w), ..Default::default() };
        let a = fit_logistic(&x, &y, fm.clone(), &spec(w)).unwrap().model;
        let b = fit_logistic(&x, &y, fm, &spec(cw)).unwrap().model;
        prop_assert!(close(a.intercept, b.intercept, 1e-6));
        for (u, v) in a.weights.iter().zip(&b.weights) {
            prop_assert!(close(*u, *v, 1e-6));
        }
    }

    #[test]
    fn logistic_loss_never_increases(seed in any::<u64>(), lambda in 0.0f64..0.1) {
        let mut r = common::rng(seed);
        let n = 60;
        let x: Vec<f64> = (0..2 * n).map(|_| r.random_range(-2.0..2.0)).collect();
        let y: Vec<bool> = (0..n).map(|_| r.random::<bool>()).collect();
        let fit = fit_logistic(&x, &y, FeatureMap::polynomial(2, 2).unwrap(), &TrainingSpec::with_lambda(lambda)).unwrap();
        prop_assert!(fit.loss_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn exponentiated_gradient_is_deterministic(seed in any::<u64>(), n in 10usize..60) {
        let mut r = common::rng(seed);
        let ds = common::random_dataset(&mut r, n, 2);
        let probs = common::random_probs(&mut r, n);
        let eta = move |x: &[f64]| {
            let i = (x[0].to_bits() % probs.len() as u64) as usize;
            probs[i]
        };
        let fm = FeatureMap::identity(2).unwrap();
        let cfg = TiltFitConfig { max_iter: 300, record_trace: true, ..Default::default() };
        let a = exponentiated_gradient(&ds, &eta, &fm, &cfg).unwrap();
        let b = exponentiated_gradient(&ds, &eta, &fm, &cfg).unwrap();
        prop_assert!(!a.trace.is_empty());
        prop_assert_eq!(a, b);
    }
}
