//! Sequential Bayesian optimization drivers.
//!
//! Both drivers start from the same Latin hypercube design (derived from the
//! run seed) and then add one query per iteration by minimizing an LCB:
//! GP-BO refits a single GP by maximum likelihood every iteration, while
//! WBGP-BO conditions a fixed-hyperparameter ensemble and minimizes the LCB
//! of its Wasserstein barycenter.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::acquisition::{optimize_acquisition, AcquisitionConfig};
use crate::error::{Error, Result};
use crate::gp::{mle_fit, Dataset, FittedGP, HyperBounds, KernelHyperparams, DEFAULT_JITTER};
use crate::wbgp::{build_pool, sample_ensemble_hyperparams, GPEnsemble};

const LHS_STREAM: u64 = 0;
const ENSEMBLE_STREAM: u64 = 1;

/// A black-box objective on the unit interval.
pub trait Objective {
    fn evaluate(&self, u: f64) -> f64;
}

impl<F: Fn(f64) -> f64> Objective for F {
    fn evaluate(&self, u: f64) -> f64 {
        self(u)
    }
}

/// Where the WBGP ensemble hyperparameters come from.
#[derive(Clone, Debug, PartialEq)]
pub enum EnsembleSource {
    /// `n` distinct pairs drawn from the 64-pair pool with the run seed.
    Sampled(usize),
    /// The entire pool.
    FullPool,
    /// An explicit list; duplicates are allowed (diagnostics only).
    Fixed(Vec<KernelHyperparams>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Algorithm {
    GpBo,
    WbgpBo(EnsembleSource),
}

/// Affine transform applied to the observed values before the surrogate is
/// fitted. The trace always records raw objective values.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum OutputScaling {
    /// Fit the raw values.
    #[default]
    None,
    /// Subtract the mean and divide by the standard deviation of the current observations.
    Standardize,
    /// Map the current observations onto `[0, 1]`.
    MinMax,
}

impl std::str::FromStr for OutputScaling {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(OutputScaling::None),
            "standardize" | "std" => Ok(OutputScaling::Standardize),
            "minmax" => Ok(OutputScaling::MinMax),
            _ => Err(Error::Unknown { kind: "output scaling", name: s.to_string() }),
        }
    }
}

impl OutputScaling {
    /// Returns the transformed values; constant inputs are only shifted.
    pub fn apply(&self, values: &[f64]) -> Vec<f64> {
        let (shift, scale) = match self {
            OutputScaling::None => (0.0, 1.0),
            OutputScaling::Standardize => {
                let n = values.len() as f64;
                let mean = values.iter().sum::<f64>() / n;
                let var = if values.len() > 1 {
                    values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0)
                } else {
                    0.0
                };
                (mean, var.sqrt())
            }
            OutputScaling::MinMax => {
                let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (lo, hi - lo)
            }
        };
        let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };
        values.iter().map(|v| (v - shift) / scale).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub n_init: usize,
    pub n_iters: usize,
    pub seed: u64,
    pub acquisition: AcquisitionConfig,
    pub jitter: f64,
    pub mle_bounds: HyperBounds,
    pub output_scaling: OutputScaling,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm, seed: u64) -> Self {
        Self {
            algorithm,
            n_init: 5,
            n_iters: 30,
            seed,
            acquisition: AcquisitionConfig::default(),
            jitter: DEFAULT_JITTER,
            mle_bounds: HyperBounds::default(),
            output_scaling: OutputScaling::default(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_init == 0 {
            return Err(Error::InvalidConfig("n_init must be at least 1".into()));
        }
        if self.jitter.is_nan() || self.jitter < 0.0 {
            return Err(Error::InvalidConfig(format!("jitter {}", self.jitter)));
        }
        self.acquisition.validate()
    }

    pub fn lhs_seed(&self) -> u64 {
        derive_seed(self.seed, LHS_STREAM)
    }

    pub fn ensemble_seed(&self) -> u64 {
        derive_seed(self.seed, ENSEMBLE_STREAM)
    }
}

/// Everything observed during one run.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunTrace {
    pub queries: Vec<f64>,
    pub values: Vec<f64>,
    pub best_so_far: Vec<f64>,
    /// Seconds spent producing each observation (model fit, acquisition and
    /// objective evaluation).
    pub wall_times: Vec<f64>,
}

impl RunTrace {
    fn record(&mut self, x: f64, y: f64, seconds: f64) {
        let best = self.best_so_far.last().map_or(y, |b| b.min(y));
        self.queries.push(x);
        self.values.push(y);
        self.best_so_far.push(best);
        self.wall_times.push(seconds);
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    pub fn final_best(&self) -> Option<f64> {
        self.best_so_far.last().copied()
    }
}

/// SplitMix64 finalizer applied to `seed` offset by `stream`.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed.wrapping_add(stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One uniform point in each of `n` equal strata of `[0, 1]`, shuffled.
pub fn lhs_init(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points: Vec<f64> = (0..n)
        .map(|i| {
            let u: f64 = rng.random();
            ((i as f64 + u) / n as f64).min(1.0)
        })
        .collect();
    points.shuffle(&mut rng);
    points
}

/// Runs whichever algorithm `cfg` selects.
pub fn run(objective: &dyn Objective, cfg: &RunConfig) -> Result<RunTrace> {
    cfg.validate()?;
    match &cfg.algorithm {
        Algorithm::GpBo => drive(objective, cfg, |data| {
            let h = mle_fit(data, &cfg.mle_bounds, cfg.jitter)?;
            let gp = FittedGP::fit_with_escalation(h, data.clone())?;
            Ok(optimize_acquisition(&gp, &cfg.acquisition))
        }),
        Algorithm::WbgpBo(source) => {
            let hyperparams = match source {
                EnsembleSource::Sampled(n) => sample_ensemble_hyperparams(&build_pool(), *n, cfg.ensemble_seed())?,
                EnsembleSource::FullPool => build_pool().all(),
                EnsembleSource::Fixed(hs) => hs.clone(),
            };
            let hyperparams: Vec<_> = hyperparams.into_iter().map(|h| h.with_jitter(cfg.jitter)).collect();
            let allow_duplicates = matches!(source, EnsembleSource::Fixed(_));
            drive(objective, cfg, |data| {
                let ensemble = if allow_duplicates {
                    GPEnsemble::fit_allow_duplicates(hyperparams.clone(), data)?
                } else {
                    GPEnsemble::fit(hyperparams.clone(), data)?
                };
                Ok(optimize_acquisition(&ensemble, &cfg.acquisition))
            })
        }
    }
}

/// Vanilla GP-BO: MLE refit every iteration.
pub fn run_gp_bo(objective: &dyn Objective, cfg: &RunConfig) -> Result<RunTrace> {
    if cfg.algorithm != Algorithm::GpBo {
        return Err(Error::InvalidConfig("run_gp_bo requires Algorithm::GpBo".into()));
    }
    run(objective, cfg)
}

/// WBGP-BO: fixed-hyperparameter ensemble, barycenter LCB.
pub fn run_wbgp_bo(objective: &dyn Objective, cfg: &RunConfig) -> Result<RunTrace> {
    if !matches!(cfg.algorithm, Algorithm::WbgpBo(_)) {
        return Err(Error::InvalidConfig("run_wbgp_bo requires Algorithm::WbgpBo".into()));
    }
    run(objective, cfg)
}

fn drive(
    objective: &dyn Objective,
    cfg: &RunConfig,
    mut next_query: impl FnMut(&Dataset) -> Result<f64>,
) -> Result<RunTrace> {
    let mut trace = RunTrace::default();
    let mut data = Dataset::default();
    for x in lhs_init(cfg.n_init, cfg.lhs_seed()) {
        let start = Instant::now();
        let y = objective.evaluate(x);
        data.push(x, y)?;
        trace.record(x, y, start.elapsed().as_secs_f64());
    }
    for iteration in 0..cfg.n_iters {
        let start = Instant::now();
        let model_data = Dataset::new(data.locations().to_vec(), cfg.output_scaling.apply(data.values()))?;
        let x = next_query(&model_data).map_err(|e| Error::RunFailed { iteration, source: Box::new(e) })?;
        let y = objective.evaluate(x);
        data.push(x, y)?;
        trace.record(x, y, start.elapsed().as_secs_f64());
    }
    Ok(trace)
}
