//! Wasserstein-barycenter GP ensembles.
//!
//! An ensemble holds `N` squared-exponential GPs with fixed, distinct
//! hyperparameters, all conditioned on the same data. At each location the
//! members' posteriors are combined into their 2-Wasserstein barycenter,
//! whose mean and standard deviation are the weighted averages of the member
//! means and standard deviations. Its LCB is therefore the weighted average
//! of the member LCBs.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::gp::{linspace, Dataset, FittedGP, KernelHyperparams, PosteriorGaussian, DEFAULT_JITTER, HYPER_LOWER, HYPER_UPPER};
use crate::wasserstein::{barycenter_1d, BarycenterWeights, GaussianMeasure1D};

pub const POOL_AXIS_SIZE: usize = 8;
pub const POOL_SIZE: usize = POOL_AXIS_SIZE * POOL_AXIS_SIZE;

/// The 64 candidate `(signal_variance, length_scale)` pairs.
#[derive(Clone, Debug, PartialEq)]
pub struct HyperparamPool {
    pairs: Vec<(f64, f64)>,
}

impl HyperparamPool {
    pub fn pairs(&self) -> &[(f64, f64)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Every pair as hyperparameters with the default jitter.
    pub fn all(&self) -> Vec<KernelHyperparams> {
        self.pairs.iter().map(|&(sf2, ls)| to_hyperparams(sf2, ls)).collect()
    }
}

/// 8x8 uniform grid over `[0.01, 0.5]^2`, row-major in signal variance.
pub fn build_pool() -> HyperparamPool {
    let axis = linspace(HYPER_LOWER, HYPER_UPPER, POOL_AXIS_SIZE);
    let pairs = axis.iter().flat_map(|&sf2| axis.iter().map(move |&ls| (sf2, ls))).collect();
    HyperparamPool { pairs }
}

fn to_hyperparams(sf2: f64, ls: f64) -> KernelHyperparams {
    KernelHyperparams { signal_variance: sf2, length_scale: ls, jitter: DEFAULT_JITTER }
}

/// Draws `n` distinct pool entries uniformly without replacement.
pub fn sample_ensemble_hyperparams(pool: &HyperparamPool, n: usize, seed: u64) -> Result<Vec<KernelHyperparams>> {
    if n > pool.len() {
        return Err(Error::PoolTooSmall { requested: n, available: pool.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, pool.len(), n)
        .into_iter()
        .map(|i| {
            let (sf2, ls) = pool.pairs[i];
            to_hyperparams(sf2, ls)
        })
        .collect())
}

/// `N` fixed-hyperparameter GPs conditioned on one dataset.
///
/// The hyperparameter list and the configured weights never change; only the
/// fitted members are rebuilt by [`refit`](Self::refit). A member whose fit
/// fails even after jitter escalation is left out of the barycenter for that
/// dataset and the remaining weights are renormalized.
#[derive(Clone, Debug)]
pub struct GPEnsemble {
    hyperparams: Vec<KernelHyperparams>,
    weights: BarycenterWeights,
    members: Vec<FittedGP>,
    active: Vec<usize>,
    active_weights: BarycenterWeights,
}

impl GPEnsemble {
    /// Equal-weight ensemble. Hyperparameter pairs must be distinct.
    pub fn fit(hyperparams: Vec<KernelHyperparams>, data: &Dataset) -> Result<Self> {
        let weights = BarycenterWeights::uniform(hyperparams.len().max(1))?;
        Self::fit_weighted(hyperparams, weights, data)
    }

    pub fn fit_weighted(hyperparams: Vec<KernelHyperparams>, weights: BarycenterWeights, data: &Dataset) -> Result<Self> {
        for (i, a) in hyperparams.iter().enumerate() {
            if hyperparams[..i]
                .iter()
                .any(|b| a.signal_variance == b.signal_variance && a.length_scale == b.length_scale)
            {
                return Err(Error::DuplicateMember(a.signal_variance, a.length_scale));
            }
        }
        Self::fit_unchecked(hyperparams, weights, data)
    }

    /// Skips the distinctness check. Only meant for diagnostics, e.g. an
    /// ensemble of identical members that must behave like a single GP.
    pub fn fit_allow_duplicates(hyperparams: Vec<KernelHyperparams>, data: &Dataset) -> Result<Self> {
        let weights = BarycenterWeights::uniform(hyperparams.len().max(1))?;
        Self::fit_unchecked(hyperparams, weights, data)
    }

    fn fit_unchecked(hyperparams: Vec<KernelHyperparams>, weights: BarycenterWeights, data: &Dataset) -> Result<Self> {
        if hyperparams.is_empty() {
            return Err(Error::EnsembleEmpty);
        }
        if hyperparams.len() != weights.len() {
            return Err(Error::DimensionMismatch(hyperparams.len(), weights.len()));
        }
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let mut members = Vec::with_capacity(hyperparams.len());
        let mut active = Vec::with_capacity(hyperparams.len());
        for (i, h) in hyperparams.iter().enumerate() {
            match FittedGP::fit_with_escalation(*h, data.clone()) {
                Ok(gp) => {
                    members.push(gp);
                    active.push(i);
                }
                Err(e) => log::warn!(
                    "dropping ensemble member {i} (sf2={}, l={}) for n={}: {e}",
                    h.signal_variance,
                    h.length_scale,
                    data.len()
                ),
            }
        }
        if members.is_empty() {
            return Err(Error::EnsembleEmpty);
        }
        let active_weights = if active.len() == hyperparams.len() {
            weights.clone()
        } else {
            BarycenterWeights::normalized(active.iter().map(|&i| weights.as_slice()[i]).collect())?
        };
        Ok(Self { hyperparams, weights, members, active, active_weights })
    }

    /// Conditions every member on `data`, keeping its own hyperparameters.
    pub fn refit(&self, data: &Dataset) -> Result<Self> {
        Self::fit_unchecked(self.hyperparams.clone(), self.weights.clone(), data)
    }

    /// Configured member hyperparameters, including any dropped members.
    pub fn hyperparams(&self) -> &[KernelHyperparams] {
        &self.hyperparams
    }

    pub fn weights(&self) -> &BarycenterWeights {
        &self.weights
    }

    /// Members that fitted successfully, in configuration order.
    pub fn members(&self) -> &[FittedGP] {
        &self.members
    }

    /// Configuration indices of [`members`](Self::members).
    pub fn active_indices(&self) -> &[usize] {
        &self.active
    }

    /// Weights actually used by the barycenter (renormalized over active members).
    pub fn active_weights(&self) -> &BarycenterWeights {
        &self.active_weights
    }

    pub fn n_members(&self) -> usize {
        self.hyperparams.len()
    }

    pub fn member_posteriors(&self, x: f64) -> Vec<PosteriorGaussian> {
        self.members.iter().map(|m| m.posterior(x)).collect()
    }

    pub fn barycenter_posterior(&self, x: f64) -> PosteriorGaussian {
        barycenter_1d(&self.member_posteriors(x), &self.active_weights).expect("ensemble has at least one member")
    }

    pub fn barycenter_posterior_batch(&self, xs: &[f64]) -> Vec<PosteriorGaussian> {
        let mut acc = vec![GaussianMeasure1D { mean: 0.0, std: 0.0 }; xs.len()];
        for (member, w) in self.members.iter().zip(self.active_weights.as_slice()) {
            for (a, p) in acc.iter_mut().zip(member.posterior_batch(xs)) {
                a.mean += w * p.mean;
                a.std += w * p.std;
            }
        }
        acc
    }

    /// LCB of the barycenter, `mean - xi * std`.
    pub fn ensemble_lcb(&self, x: f64, xi: f64) -> f64 {
        self.barycenter_posterior(x).lcb(xi)
    }

    /// UCB of the barycenter, `mean + xi * std`.
    pub fn ensemble_ucb(&self, x: f64, xi: f64) -> f64 {
        self.barycenter_posterior(x).ucb(xi)
    }

    /// Weighted average of the member LCBs; equal to [`ensemble_lcb`](Self::ensemble_lcb).
    pub fn mean_member_lcb(&self, x: f64, xi: f64) -> f64 {
        self.members
            .iter()
            .zip(self.active_weights.as_slice())
            .map(|(m, w)| w * m.posterior(x).lcb(xi))
            .sum()
    }

    /// Weighted average of the member UCBs.
    pub fn mean_member_ucb(&self, x: f64, xi: f64) -> f64 {
        self.members
            .iter()
            .zip(self.active_weights.as_slice())
            .map(|(m, w)| w * m.posterior(x).ucb(xi))
            .sum()
    }
}
