//! Startup checks: reference minima of the test problems and the
//! averaged-LCB identity of the barycenter surrogate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bench::problems::{problem_suite, MINIMUM_TOLERANCE};
use crate::error::Result;
use crate::gp::Dataset;
use crate::wbgp::{build_pool, sample_ensemble_hyperparams, GPEnsemble, POOL_SIZE};

/// Largest allowed gap between the two sides of the LCB/UCB identity.
pub const IDENTITY_TOLERANCE: f64 = 1e-12;

#[derive(Clone, Debug)]
pub struct ProblemCheck {
    pub name: &'static str,
    pub value: f64,
    pub expected: f64,
    pub passed: bool,
}

pub fn check_problems() -> Vec<ProblemCheck> {
    problem_suite()
        .into_iter()
        .map(|p| {
            let value = (p.formula)(p.known_minimizer);
            ProblemCheck { name: p.name, value, expected: p.known_minimum, passed: p.self_check_error() < MINIMUM_TOLERANCE }
        })
        .collect()
}

#[derive(Clone, Copy, Debug)]
pub struct IdentityReport {
    pub trials: usize,
    pub max_lcb_gap: f64,
    pub max_ucb_gap: f64,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.max_lcb_gap <= IDENTITY_TOLERANCE && self.max_ucb_gap <= IDENTITY_TOLERANCE
    }
}

/// Compares the barycenter LCB/UCB with the average of the member bounds
/// on `trials` random `(ensemble, x, xi)` triples.
pub fn check_lcb_identity(trials: usize, seed: u64) -> Result<IdentityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pool = build_pool();
    let mut report = IdentityReport { trials, max_lcb_gap: 0.0, max_ucb_gap: 0.0 };
    let mut t = 0;
    while t < trials {
        let n_data = rng.random_range(1..=10);
        let xs: Vec<f64> = (0..n_data).map(|_| rng.random::<f64>()).collect();
        let ys: Vec<f64> = (0..n_data).map(|_| rng.random_range(-2.0..2.0)).collect();
        let data = Dataset::new(xs, ys)?;
        let members = rng.random_range(1..=32.min(POOL_SIZE));
        let ensemble = GPEnsemble::fit(sample_ensemble_hyperparams(&pool, members, rng.random())?, &data)?;
        // several points per ensemble keep the check cheap
        for _ in 0..10.min(trials - t) {
            let x: f64 = rng.random();
            let xi: f64 = rng.random_range(1e-3..5.0);
            let lcb_gap = (ensemble.mean_member_lcb(x, xi) - ensemble.ensemble_lcb(x, xi)).abs();
            let ucb_gap = (ensemble.mean_member_ucb(x, xi) - ensemble.ensemble_ucb(x, xi)).abs();
            report.max_lcb_gap = report.max_lcb_gap.max(lcb_gap);
            report.max_ucb_gap = report.max_ucb_gap.max(ucb_gap);
            t += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn problems_pass() {
        assert!(check_problems().iter().all(|c| c.passed));
    }

    #[test]
    fn identity_holds() {
        let r = check_lcb_identity(200, 1).unwrap();
        assert_eq!(r.trials, 200);
        assert!(r.passed(), "{r:?}");
    }
}
