//! Squared-exponential Gaussian Process regression on the unit interval.
//!
//! The prior mean is fixed to zero. A small jitter is added to the Gram
//! matrix diagonal; when the Cholesky factorization still fails the caller
//! can use [`FittedGP::fit_with_escalation`], which raises the jitter by a
//! factor of ten up to [`MAX_JITTER`].

use std::f64::consts::PI;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};
use crate::wasserstein::GaussianMeasure1D;

pub const DEFAULT_JITTER: f64 = 1e-6;
pub const MAX_JITTER: f64 = 1e-2;
const JITTER_GROWTH: f64 = 10.0;

/// Bounds of the `(signal_variance, length_scale)` box shared by the
/// ensemble pool and the MLE search.
pub const HYPER_LOWER: f64 = 0.01;
pub const HYPER_UPPER: f64 = 0.5;

/// Number of grid values per axis used to seed the MLE search.
pub const MLE_GRID_SIZE: usize = 8;
/// Golden-section iterations per coordinate and sweep during MLE refinement.
pub const MLE_REFINE_ITERS: usize = 50;
const MLE_SWEEPS: usize = 2;

/// The predictive distribution of `f(x)`.
pub type PosteriorGaussian = GaussianMeasure1D;

/// Observations `(x_i, y_i)` with every `x_i` in `[0, 1]`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Dataset {
    locations: Vec<f64>,
    values: Vec<f64>,
}

impl Dataset {
    pub fn new(locations: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if locations.len() != values.len() {
            return Err(Error::LengthMismatch { locations: locations.len(), values: values.len() });
        }
        if let Some(&x) = locations.iter().find(|x| !(0.0..=1.0).contains(*x)) {
            return Err(Error::OutOfUnitInterval(x));
        }
        Ok(Self { locations, values })
    }

    pub fn push(&mut self, x: f64, y: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::OutOfUnitInterval(x));
        }
        self.locations.push(x);
        self.values.push(y);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.locations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.locations.is_empty()
    }

    pub fn locations(&self) -> &[f64] {
        &self.locations
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// SE kernel hyperparameters: signal variance, length-scale and diagonal jitter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KernelHyperparams {
    pub signal_variance: f64,
    pub length_scale: f64,
    pub jitter: f64,
}

impl KernelHyperparams {
    pub fn new(signal_variance: f64, length_scale: f64, jitter: f64) -> Result<Self> {
        if !(signal_variance > 0.0 && signal_variance.is_finite()) {
            return Err(Error::InvalidHyperparams(format!("signal variance {signal_variance}")));
        }
        if !(length_scale > 0.0 && length_scale.is_finite()) {
            return Err(Error::InvalidHyperparams(format!("length-scale {length_scale}")));
        }
        if !(jitter >= 0.0 && jitter.is_finite()) {
            return Err(Error::InvalidHyperparams(format!("jitter {jitter}")));
        }
        Ok(Self { signal_variance, length_scale, jitter })
    }

    pub fn with_jitter(self, jitter: f64) -> Self {
        Self { jitter, ..self }
    }

    #[inline]
    pub fn kernel(&self, x: f64, x2: f64) -> f64 {
        kernel_eval(self, x, x2)
    }
}

/// `sf2 * exp(-(x - x2)^2 / (2 l^2))`.
#[inline]
pub fn kernel_eval(h: &KernelHyperparams, x: f64, x2: f64) -> f64 {
    let d = x - x2;
    h.signal_variance * (-d * d / (2.0 * h.length_scale * h.length_scale)).exp()
}

/// A GP conditioned on a dataset. Immutable once built.
#[derive(Clone, Debug)]
pub struct FittedGP {
    hyperparams: KernelHyperparams,
    data: Dataset,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
}

impl FittedGP {
    /// Factorizes `K + jitter * I` and solves for `alpha`.
    pub fn fit(hyperparams: KernelHyperparams, data: Dataset) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptyDataset);
        }
        let x = data.locations();
        let n = x.len();
        let gram = DMatrix::from_fn(n, n, |i, j| {
            let k = hyperparams.kernel(x[i], x[j]);
            if i == j {
                k + hyperparams.jitter
            } else {
                k
            }
        });
        let chol = Cholesky::new(gram).ok_or(Error::NotPositiveDefinite { jitter: hyperparams.jitter })?;
        // reject zero or non-finite pivots
        if chol.l_dirty().diagonal().iter().any(|d| *d <= 0.0 || !d.is_finite()) {
            return Err(Error::NotPositiveDefinite { jitter: hyperparams.jitter });
        }
        let alpha = chol.solve(&DVector::from_column_slice(data.values()));
        if alpha.iter().any(|a| !a.is_finite()) {
            return Err(Error::NotPositiveDefinite { jitter: hyperparams.jitter });
        }
        Ok(Self { hyperparams, data, chol, alpha })
    }

    /// Like [`fit`](Self::fit), but on factorization failure retries with the
    /// jitter multiplied by ten until it exceeds [`MAX_JITTER`]. A zero jitter
    /// escalates to [`DEFAULT_JITTER`] first.
    pub fn fit_with_escalation(hyperparams: KernelHyperparams, data: Dataset) -> Result<Self> {
        let mut jitter = hyperparams.jitter;
        loop {
            match Self::fit(hyperparams.with_jitter(jitter), data.clone()) {
                Ok(gp) => return Ok(gp),
                Err(Error::NotPositiveDefinite { .. }) => {
                    jitter = if jitter == 0.0 { DEFAULT_JITTER } else { jitter * JITTER_GROWTH };
                    if jitter > MAX_JITTER * (1.0 + 1e-9) {
                        return Err(Error::NotPositiveDefinite { jitter: MAX_JITTER });
                    }
                }
                Err(e) => return Err(e),
            }
        }
    }

    pub fn hyperparams(&self) -> &KernelHyperparams {
        &self.hyperparams
    }

    pub fn data(&self) -> &Dataset {
        &self.data
    }

    /// Lower-triangular factor `L` with `L L^T = K + jitter * I`.
    pub fn chol_factor(&self) -> DMatrix<f64> {
        self.chol.l()
    }

    pub fn alpha(&self) -> &DVector<f64> {
        &self.alpha
    }

    fn cross_kernel(&self, x: f64) -> DVector<f64> {
        DVector::from_iterator(self.data.len(), self.data.locations().iter().map(|xi| self.hyperparams.kernel(x, *xi)))
    }

    /// Posterior variance before clamping; may be slightly negative due to
    /// cancellation close to the training locations.
    pub fn raw_variance(&self, x: f64) -> f64 {
        let mut v = self.cross_kernel(x);
        self.chol.l_dirty().solve_lower_triangular_unchecked_mut(&mut v);
        self.hyperparams.signal_variance - v.norm_squared()
    }

    pub fn posterior(&self, x: f64) -> PosteriorGaussian {
        let k = self.cross_kernel(x);
        let mean = k.dot(&self.alpha);
        let mut v = k;
        self.chol.l_dirty().solve_lower_triangular_unchecked_mut(&mut v);
        let var = self.hyperparams.signal_variance - v.norm_squared();
        GaussianMeasure1D { mean, std: var.max(0.0).sqrt() }
    }

    /// Posterior at many points with one triangular solve.
    pub fn posterior_batch(&self, xs: &[f64]) -> Vec<PosteriorGaussian> {
        let n = self.data.len();
        let loc = self.data.locations();
        let mut cross = DMatrix::from_fn(n, xs.len(), |i, j| self.hyperparams.kernel(xs[j], loc[i]));
        let means = cross.tr_mul(&self.alpha);
        self.chol.l_dirty().solve_lower_triangular_unchecked_mut(&mut cross);
        cross
            .column_iter()
            .zip(means.iter())
            .map(|(v, &mean)| {
                let var = self.hyperparams.signal_variance - v.norm_squared();
                GaussianMeasure1D { mean, std: var.max(0.0).sqrt() }
            })
            .collect()
    }

    /// `-1/2 y^T alpha - sum log L_ii - n/2 log(2 pi)`.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let y = DVector::from_column_slice(self.data.values());
        let n = self.data.len() as f64;
        let log_det_half: f64 = self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        -0.5 * y.dot(&self.alpha) - log_det_half - 0.5 * n * (2.0 * PI).ln()
    }
}

/// Axis-aligned box for `(signal_variance, length_scale)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HyperBounds {
    pub signal_variance: (f64, f64),
    pub length_scale: (f64, f64),
}

impl Default for HyperBounds {
    fn default() -> Self {
        Self { signal_variance: (HYPER_LOWER, HYPER_UPPER), length_scale: (HYPER_LOWER, HYPER_UPPER) }
    }
}

impl HyperBounds {
    fn validate(&self) -> Result<()> {
        for (name, (lo, hi)) in [("signal variance", self.signal_variance), ("length-scale", self.length_scale)] {
            if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
                return Err(Error::InvalidHyperparams(format!("{name} bounds [{lo}, {hi}]")));
            }
        }
        Ok(())
    }
}

/// `n` equally spaced values spanning `[lo, hi]` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![lo],
        _ => (0..n)
            .map(|i| if i == n - 1 { hi } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
            .collect(),
    }
}

/// Maximum-likelihood `(signal_variance, length_scale)` within `bounds`.
///
/// The log marginal likelihood is evaluated on an 8x8 grid, then the best
/// cell is refined by cyclic golden-section search in log-space. Points
/// whose factorization fails are treated as infeasible. When every grid
/// point fails, the search is repeated once with ten times the jitter.
pub fn mle_fit(data: &Dataset, bounds: &HyperBounds, jitter: f64) -> Result<KernelHyperparams> {
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    bounds.validate()?;
    match mle_search(data, bounds, jitter) {
        Some(h) => Ok(h),
        None => {
            let escalated = if jitter == 0.0 { DEFAULT_JITTER } else { jitter * JITTER_GROWTH };
            log::warn!("MLE grid failed at jitter {jitter:e}; retrying with {escalated:e}");
            mle_search(data, bounds, escalated)
                .ok_or_else(|| Error::MleFailed(format!("no feasible hyperparameters at jitter {escalated:e}")))
        }
    }
}

fn mle_search(data: &Dataset, bounds: &HyperBounds, jitter: f64) -> Option<KernelHyperparams> {
    let objective = |sf2: f64, ls: f64| -> f64 {
        KernelHyperparams::new(sf2, ls, jitter)
            .and_then(|h| FittedGP::fit(h, data.clone()))
            .map(|gp| gp.log_marginal_likelihood())
            .ok()
            .filter(|v| v.is_finite())
            .unwrap_or(f64::NEG_INFINITY)
    };

    let sf_axis = linspace(bounds.signal_variance.0, bounds.signal_variance.1, MLE_GRID_SIZE);
    let ls_axis = linspace(bounds.length_scale.0, bounds.length_scale.1, MLE_GRID_SIZE);

    let mut best = (f64::NEG_INFINITY, 0usize, 0usize);
    for (i, &sf2) in sf_axis.iter().enumerate() {
        for (j, &ls) in ls_axis.iter().enumerate() {
            let v = objective(sf2, ls);
            if v > best.0 {
                best = (v, i, j);
            }
        }
    }
    let (mut best_value, bi, bj) = best;
    if best_value == f64::NEG_INFINITY {
        return None;
    }

    let bracket = |axis: &[f64], k: usize| (axis[k.saturating_sub(1)], axis[(k + 1).min(axis.len() - 1)]);
    let sf_bracket = bracket(&sf_axis, bi);
    let ls_bracket = bracket(&ls_axis, bj);
    let mut sf2 = sf_axis[bi];
    let mut ls = ls_axis[bj];

    for _ in 0..MLE_SWEEPS {
        let (x, v) = golden_max_log(|l| objective(sf2, l), ls_bracket, MLE_REFINE_ITERS);
        if v > best_value {
            ls = x;
            best_value = v;
        }
        let (x, v) = golden_max_log(|s| objective(s, ls), sf_bracket, MLE_REFINE_ITERS);
        if v > best_value {
            sf2 = x;
            best_value = v;
        }
    }
    Some(KernelHyperparams { signal_variance: sf2, length_scale: ls, jitter })
}

/// Golden-section maximization over `[lo, hi]` in log-space. The bracket
/// endpoints are also considered so that optima on the box boundary are
/// returned exactly.
fn golden_max_log(f: impl Fn(f64) -> f64, (lo, hi): (f64, f64), iters: usize) -> (f64, f64) {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo.ln(), hi.ln());
    let mut best = (lo, f(lo));
    let fh = f(hi);
    if fh > best.1 {
        best = (hi, fh);
    }
    if b - a <= 0.0 {
        return best;
    }
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = f(c.exp());
    let mut fd = f(d.exp());
    for _ in 0..iters {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c.exp());
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d.exp());
        }
    }
    for (x, v) in [(c.exp(), fc), (d.exp(), fd)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    best
}
