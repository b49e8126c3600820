//! Bayesian optimization with Wasserstein-barycenter Gaussian Process
//! ensembles (WBGP-BO), a maximum-likelihood GP-BO baseline, and a seeded
//! benchmark harness over nine univariate test problems.
//!
//! The search space is always the unit interval; test problems rescale it
//! onto their original domains.

pub mod acquisition;
pub mod bench;
pub mod bo;
pub mod error;
pub mod gp;
pub mod selfcheck;
pub mod wasserstein;
pub mod wbgp;

pub use acquisition::{lcb, optimize_acquisition, AcquisitionConfig, Surrogate};
pub use bo::{lhs_init, run, run_gp_bo, run_wbgp_bo, Algorithm, EnsembleSource, Objective, OutputScaling, RunConfig, RunTrace};
pub use error::{Error, Result};
pub use gp::{kernel_eval, mle_fit, Dataset, FittedGP, HyperBounds, KernelHyperparams, PosteriorGaussian};
pub use wasserstein::{barycenter_1d, bures_squared, w2_squared_1d, w2_squared_nd, BarycenterWeights, GaussianMeasure1D, GaussianMeasureND};
pub use wbgp::{build_pool, sample_ensemble_hyperparams, GPEnsemble, HyperparamPool};
