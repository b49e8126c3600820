//! Reference implementations shared by the integration tests.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};

use wbgp_bo::{Dataset, KernelHyperparams};

/// Posterior mean and std through an explicit inverse of the Gram matrix.
pub fn dense_posterior(h: &KernelHyperparams, data: &Dataset, x: f64) -> (f64, f64) {
    let xs = data.locations();
    let n = xs.len();
    let se = |a: f64, b: f64| h.signal_variance * (-(a - b).powi(2) / (2.0 * h.length_scale.powi(2))).exp();
    let k = DMatrix::from_fn(n, n, |i, j| se(xs[i], xs[j]) + if i == j { h.jitter } else { 0.0 });
    let kinv = k.clone().try_inverse().expect("invertible Gram matrix");
    // one step of iterative refinement; a bare inverse loses ~1e-10 in the variance
    let solve = |b: &DVector<f64>| {
        let z = &kinv * b;
        let r = b - &k * &z;
        z + &kinv * r
    };
    let ks = DVector::from_fn(n, |i, _| se(x, xs[i]));
    let y = DVector::from_column_slice(data.values());
    let mean = ks.dot(&solve(&y));
    let var = h.signal_variance - ks.dot(&solve(&ks));
    (mean, var.max(0.0).sqrt())
}

/// Two-sided exact signed-rank p-value by enumerating all 2^n sign patterns
/// of the nonzero differences (midranks for ties).
pub fn enumerated_wilcoxon(diffs: &[f64]) -> f64 {
    let d: Vec<f64> = diffs.iter().copied().filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return 1.0;
    }
    let ranks: Vec<f64> = d
        .iter()
        .map(|v| {
            let below = d.iter().filter(|w| w.abs() < v.abs()).count() as f64;
            let equal = d.iter().filter(|w| w.abs() == v.abs()).count() as f64;
            below + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = ranks.iter().zip(&d).filter(|(_, v)| **v > 0.0).map(|(r, _)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|i| mask >> i & 1 == 1).map(|i| ranks[i]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    (2.0 * (le as f64 / total).min(ge as f64 / total)).min(1.0)
}
