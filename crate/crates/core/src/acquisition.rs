//! LCB acquisition and its minimization over `[0, 1]`.
//!
//! The minimizer scans a uniform grid (ties go to the smallest `x`), then
//! runs golden-section search inside the interval bracketing the best grid
//! point. The refined point replaces the grid incumbent only when strictly
//! better.

use crate::error::{Error, Result};
use crate::gp::{FittedGP, PosteriorGaussian};
use crate::wbgp::GPEnsemble;

pub const DEFAULT_XI: f64 = 2.0;
pub const DEFAULT_GRID_SIZE: usize = 1001;
pub const DEFAULT_REFINE_ITERS: usize = 40;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AcquisitionConfig {
    pub xi: f64,
    pub grid_size: usize,
    pub refine_iters: usize,
}

impl Default for AcquisitionConfig {
    fn default() -> Self {
        Self { xi: DEFAULT_XI, grid_size: DEFAULT_GRID_SIZE, refine_iters: DEFAULT_REFINE_ITERS }
    }
}

impl AcquisitionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.xi > 0.0 && self.xi.is_finite()) {
            return Err(Error::InvalidConfig(format!("xi must be positive, got {}", self.xi)));
        }
        if self.grid_size < 2 {
            return Err(Error::InvalidConfig(format!("grid size must be at least 2, got {}", self.grid_size)));
        }
        Ok(())
    }
}

/// Anything that yields a Gaussian predictive distribution on `[0, 1]`.
pub trait Surrogate {
    fn predict(&self, x: f64) -> PosteriorGaussian;

    fn predict_batch(&self, xs: &[f64]) -> Vec<PosteriorGaussian> {
        xs.iter().map(|&x| self.predict(x)).collect()
    }
}

impl Surrogate for FittedGP {
    fn predict(&self, x: f64) -> PosteriorGaussian {
        self.posterior(x)
    }

    fn predict_batch(&self, xs: &[f64]) -> Vec<PosteriorGaussian> {
        self.posterior_batch(xs)
    }
}

impl Surrogate for GPEnsemble {
    fn predict(&self, x: f64) -> PosteriorGaussian {
        self.barycenter_posterior(x)
    }

    fn predict_batch(&self, xs: &[f64]) -> Vec<PosteriorGaussian> {
        self.barycenter_posterior_batch(xs)
    }
}

/// Adapts a closure into a [`Surrogate`].
pub struct FnSurrogate<F>(pub F);

impl<F: Fn(f64) -> PosteriorGaussian> Surrogate for FnSurrogate<F> {
    fn predict(&self, x: f64) -> PosteriorGaussian {
        (self.0)(x)
    }
}

/// `mean - xi * std`.
#[inline]
pub fn lcb(p: &PosteriorGaussian, xi: f64) -> f64 {
    p.mean - xi * p.std
}

/// Minimizes the LCB of `surrogate` over `[0, 1]`.
pub fn optimize_acquisition<S: Surrogate + ?Sized>(surrogate: &S, cfg: &AcquisitionConfig) -> f64 {
    let xi = cfg.xi;
    minimize_unit_interval(
        |xs| surrogate.predict_batch(xs).iter().map(|p| lcb(p, xi)).collect(),
        |x| lcb(&surrogate.predict(x), xi),
        cfg.grid_size,
        cfg.refine_iters,
    )
}

/// Minimizes an arbitrary scalar function over `[0, 1]` with the same
/// grid-then-golden-section procedure as [`optimize_acquisition`].
pub fn minimize_scalar(f: impl Fn(f64) -> f64, grid_size: usize, refine_iters: usize) -> f64 {
    minimize_unit_interval(|xs| xs.iter().map(|&x| f(x)).collect(), &f, grid_size, refine_iters)
}

fn minimize_unit_interval(
    batch: impl Fn(&[f64]) -> Vec<f64>,
    point: impl Fn(f64) -> f64,
    grid_size: usize,
    refine_iters: usize,
) -> f64 {
    let grid_size = grid_size.max(2);
    let last = (grid_size - 1) as f64;
    let grid: Vec<f64> = (0..grid_size).map(|i| i as f64 / last).collect();
    let values = batch(&grid);

    let mut best_idx = 0;
    let mut best_val = sanitize(values[0]);
    for (i, v) in values.iter().enumerate().skip(1) {
        let v = sanitize(*v);
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }

    let lo = grid[best_idx.saturating_sub(1)];
    let hi = grid[(best_idx + 1).min(grid_size - 1)];
    let (x, v) = golden_min(|x| sanitize(point(x)), lo, hi, refine_iters);
    if v < best_val {
        x.clamp(0.0, 1.0)
    } else {
        grid[best_idx]
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn golden_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..iters {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}
