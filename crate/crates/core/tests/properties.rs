use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

use wbgp_bo::wasserstein::barycenter_objective;
use wbgp_bo::{
    barycenter_1d, bures_squared, kernel_eval, w2_squared_1d, w2_squared_nd, BarycenterWeights, Dataset, FittedGP,
    GPEnsemble, GaussianMeasure1D, GaussianMeasureND, KernelHyperparams,
};

mod common;

fn hyperparams() -> impl Strategy<Value = KernelHyperparams> {
    (0.01f64..0.5, 0.01f64..0.5).prop_map(|(s, l)| KernelHyperparams::new(s, l, 1e-6).unwrap())
}

fn dataset(max: usize) -> impl Strategy<Value = Dataset> {
    prop::collection::vec((0.0f64..1.0, -2.0f64..2.0), 1..=max)
        .prop_map(|pairs| Dataset::new(pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1).collect()).unwrap())
}

/// Distinct locations on a 50-point lattice with jittered offsets.
fn spread_dataset(max: usize) -> impl Strategy<Value = Dataset> {
    prop::sample::subsequence((0..50).collect::<Vec<usize>>(), 1..=max)
        .prop_flat_map(|idx| {
            let n = idx.len();
            (Just(idx), prop::collection::vec(0.0f64..0.01, n), prop::collection::vec(-2.0f64..2.0, n))
        })
        .prop_map(|(idx, off, ys)| Dataset::new(idx.iter().zip(&off).map(|(&i, o)| i as f64 / 50.0 + o).collect(), ys).unwrap())
}

fn measure() -> impl Strategy<Value = GaussianMeasure1D> {
    (-5.0f64..5.0, 0.0f64..3.0).prop_map(|(m, s)| GaussianMeasure1D::new(m, s))
}

fn spd(n: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, n * n).prop_map(move |v| {
        let a = DMatrix::from_vec(n, n, v);
        &a * a.transpose() + DMatrix::identity(n, n) * 0.1
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn kernel_is_symmetric_and_bounded(h in hyperparams(), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let k = kernel_eval(&h, a, b);
        prop_assert_eq!(k, kernel_eval(&h, b, a));
        prop_assert!(k >= 0.0 && k <= h.signal_variance);
        prop_assert_eq!(kernel_eval(&h, a, a), h.signal_variance);
    }

    #[test]
    fn posterior_matches_explicit_inverse(h in hyperparams(), data in spread_dataset(10), x in 0.0f64..1.0) {
        let gp = FittedGP::fit(h, data.clone()).unwrap();
        let p = gp.posterior(x);
        let (mean, std) = common::dense_posterior(&h, &data, x);
        prop_assert!((p.mean - mean).abs() <= 1e-8, "mean {} vs {}", p.mean, mean);
        prop_assert!((p.std - std).abs() <= 1e-8, "std {} vs {}", p.std, std);
    }

    #[test]
    fn noiseless_posterior_interpolates(sf2 in 0.01f64..0.5, ls in 0.01f64..0.03, data in spread_dataset(10)) {
        let gp = FittedGP::fit(KernelHyperparams::new(sf2, ls, 0.0).unwrap(), data.clone()).unwrap();
        for (x, y) in data.locations().iter().zip(data.values()) {
            prop_assert!((gp.posterior(*x).mean - y).abs() <= 1e-6);
        }
    }

    #[test]
    fn raw_variance_is_nonnegative_up_to_roundoff(h in hyperparams(), data in dataset(12), x in 0.0f64..1.0) {
        let gp = FittedGP::fit(h, data).unwrap();
        prop_assert!(gp.raw_variance(x) >= -1e-8);
        prop_assert!(gp.posterior(x).std >= 0.0);
    }

    #[test]
    fn log_marginal_likelihood_ignores_order(h in hyperparams(), data in dataset(8), shift in 0usize..8) {
        let n = data.len();
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).rev().collect();
        let permuted = Dataset::new(
            order.iter().map(|&i| data.locations()[i]).collect(),
            order.iter().map(|&i| data.values()[i]).collect(),
        ).unwrap();
        let a = FittedGP::fit(h, data).unwrap().log_marginal_likelihood();
        let b = FittedGP::fit(h, permuted).unwrap().log_marginal_likelihood();
        prop_assert!((a - b).abs() <= 1e-6 * (1.0 + a.abs()), "{} vs {}", a, b);
    }

    #[test]
    fn w2_is_a_metric(a in measure(), b in measure(), c in measure()) {
        let d = |p: &GaussianMeasure1D, q: &GaussianMeasure1D| w2_squared_1d(p, q).sqrt();
        prop_assert_eq!(d(&a, &b), d(&b, &a));
        prop_assert_eq!(d(&a, &a), 0.0);
        prop_assert!(d(&a, &c) <= d(&a, &b) + d(&b, &c) + 1e-9);
    }

    #[test]
    fn univariate_and_1x1_agree(a in measure(), b in measure()) {
        let lift = |g: &GaussianMeasure1D| {
            GaussianMeasureND::new(DVector::from_element(1, g.mean), DMatrix::from_element(1, 1, g.std * g.std)).unwrap()
        };
        let nd = w2_squared_nd(&lift(&a), &lift(&b)).unwrap();
        prop_assert!((nd - w2_squared_1d(&a, &b)).abs() <= 1e-10 * (1.0 + nd));
    }

    #[test]
    fn bures_is_symmetric_and_zero_on_diagonal(a in spd(3), b in spd(3)) {
        let ab = bures_squared(&a, &b).unwrap();
        let ba = bures_squared(&b, &a).unwrap();
        prop_assert!((ab - ba).abs() <= 1e-8 * (1.0 + ab));
        prop_assert!(ab >= -1e-10);
        prop_assert!(bures_squared(&a, &a).unwrap().abs() <= 1e-8);
    }

    #[test]
    fn bures_of_commuting_matrices_is_frobenius_of_roots(d1 in prop::collection::vec(0.0f64..4.0, 3), d2 in prop::collection::vec(0.0f64..4.0, 3)) {
        let a = DMatrix::from_diagonal(&DVector::from_vec(d1.clone()));
        let b = DMatrix::from_diagonal(&DVector::from_vec(d2.clone()));
        let frobenius: f64 = d1.iter().zip(&d2).map(|(x, y)| (x.sqrt() - y.sqrt()).powi(2)).sum();
        prop_assert!((bures_squared(&a, &b).unwrap() - frobenius).abs() <= 1e-9);
    }

    #[test]
    fn barycenter_lies_in_convex_hull(ms in prop::collection::vec(measure(), 1..10), raw in prop::collection::vec(0.01f64..1.0, 10)) {
        let w = BarycenterWeights::normalized(raw[..ms.len()].to_vec()).unwrap();
        let bar = barycenter_1d(&ms, &w).unwrap();
        let (lo_m, hi_m) = ms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), g| (l.min(g.mean), h.max(g.mean)));
        let (lo_s, hi_s) = ms.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), g| (l.min(g.std), h.max(g.std)));
        prop_assert!(bar.mean >= lo_m - 1e-12 && bar.mean <= hi_m + 1e-12);
        prop_assert!(bar.std >= lo_s - 1e-12 && bar.std <= hi_s + 1e-12);
    }

    #[test]
    fn barycenter_beats_perturbations(ms in prop::collection::vec(measure(), 1..8), dm in -1.0f64..1.0, ds in -1.0f64..1.0) {
        let w = BarycenterWeights::uniform(ms.len()).unwrap();
        let bar = barycenter_1d(&ms, &w).unwrap();
        let other = GaussianMeasure1D::new(bar.mean + dm, (bar.std + ds).max(0.0));
        prop_assert!(barycenter_objective(&bar, &ms, &w) <= barycenter_objective(&other, &ms, &w) + 1e-12);
    }

    #[test]
    fn one_hot_barycenter_is_the_member(ms in prop::collection::vec(measure(), 1..8), pick in 0usize..8) {
        let i = pick % ms.len();
        let bar = barycenter_1d(&ms, &BarycenterWeights::one_hot(ms.len(), i).unwrap()).unwrap();
        prop_assert_eq!(bar, ms[i]);
    }

    #[test]
    fn averaged_bounds_equal_barycenter_bounds(data in dataset(8), n in 1usize..=16, seed in any::<u64>(), x in 0.0f64..1.0, xi in 0.001f64..5.0) {
        let hs = wbgp_bo::sample_ensemble_hyperparams(&wbgp_bo::build_pool(), n, seed).unwrap();
        let e = GPEnsemble::fit(hs, &data).unwrap();
        prop_assert!((e.mean_member_lcb(x, xi) - e.ensemble_lcb(x, xi)).abs() <= 1e-12);
        prop_assert!((e.mean_member_ucb(x, xi) - e.ensemble_ucb(x, xi)).abs() <= 1e-12);
    }
}
