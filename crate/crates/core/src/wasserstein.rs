//! Closed-form 2-Wasserstein geometry between Gaussian measures.
//!
//! For univariate Gaussians the squared distance is the squared Euclidean
//! distance between `(mean, std)` pairs, so the weighted barycenter is simply
//! the weighted average of means and of standard deviations. The multivariate
//! distance adds the squared Bures metric between covariance matrices.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};

/// Tolerance used when validating symmetry and positive semi-definiteness.
pub const PSD_TOLERANCE: f64 = 1e-10;

/// Tolerance on the sum of barycentric weights.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-12;

/// A univariate Gaussian `N(mean, std)`. `std == 0` is a point mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianMeasure1D {
    pub mean: f64,
    pub std: f64,
}

impl GaussianMeasure1D {
    pub fn new(mean: f64, std: f64) -> Self {
        debug_assert!(std >= 0.0, "negative standard deviation {std}");
        Self { mean, std }
    }

    /// Lower confidence bound `mean - xi * std`.
    pub fn lcb(&self, xi: f64) -> f64 {
        self.mean - xi * self.std
    }

    /// Upper confidence bound `mean + xi * std`.
    pub fn ucb(&self, xi: f64) -> f64 {
        self.mean + xi * self.std
    }
}

/// A multivariate Gaussian with mean vector and covariance matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianMeasureND {
    mean: DVector<f64>,
    covariance: DMatrix<f64>,
}

impl GaussianMeasureND {
    pub fn new(mean: DVector<f64>, covariance: DMatrix<f64>) -> Result<Self> {
        if covariance.nrows() != covariance.ncols() {
            return Err(Error::InvalidCovariance(format!(
                "covariance is {}x{}",
                covariance.nrows(),
                covariance.ncols()
            )));
        }
        if mean.len() != covariance.nrows() {
            return Err(Error::DimensionMismatch(mean.len(), covariance.nrows()));
        }
        check_psd(&covariance)?;
        Ok(Self { mean, covariance })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }
}

/// Barycentric coordinates: nonnegative weights summing to one.
#[derive(Clone, Debug, PartialEq)]
pub struct BarycenterWeights(Vec<f64>);

impl BarycenterWeights {
    /// Validates weights that should already sum to one.
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        if let Some(w) = weights.iter().find(|w| **w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidWeights(format!("weight {w} is not a finite nonnegative number")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}, not 1")));
        }
        Ok(Self(weights))
    }

    /// Rescales arbitrary nonnegative weights to sum to one.
    pub fn normalized(weights: Vec<f64>) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if sum <= 0.0 || !sum.is_finite() {
            return Err(Error::InvalidWeights(format!("weights sum to {sum}")));
        }
        Self::new(weights.into_iter().map(|w| w / sum).collect())
    }

    /// Equal weights `1/n`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidWeights("no weights".into()));
        }
        Ok(Self(vec![1.0 / n as f64; n]))
    }

    /// Puts all the mass on entry `index`.
    pub fn one_hot(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidWeights(format!("index {index} out of {n}")));
        }
        let mut w = vec![0.0; n];
        w[index] = 1.0;
        Ok(Self(w))
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Squared 2-Wasserstein distance between univariate Gaussians.
pub fn w2_squared_1d(a: &GaussianMeasure1D, b: &GaussianMeasure1D) -> f64 {
    let dm = a.mean - b.mean;
    let ds = a.std - b.std;
    dm * dm + ds * ds
}

/// Squared Bures metric `tr(A + B - 2 (A^1/2 B A^1/2)^1/2)`, clamped at zero.
pub fn bures_squared(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch(a.nrows(), b.nrows()));
    }
    let root_a = psd_sqrt(a)?;
    let cross = &root_a * b * &root_a;
    let cross = (&cross + cross.transpose()) * 0.5;
    let root_cross = psd_sqrt(&cross)?;
    let value = a.trace() + b.trace() - 2.0 * root_cross.trace();
    Ok(value.max(0.0))
}

/// Squared 2-Wasserstein distance between multivariate Gaussians.
pub fn w2_squared_nd(a: &GaussianMeasureND, b: &GaussianMeasureND) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch(a.dim(), b.dim()));
    }
    let mean_term = (&a.mean - &b.mean).norm_squared();
    Ok(mean_term + bures_squared(&a.covariance, &b.covariance)?)
}

/// Weighted Wasserstein barycenter of univariate Gaussians:
/// `N(sum w_i m_i, sum w_i s_i)`.
pub fn barycenter_1d(
    measures: &[GaussianMeasure1D],
    weights: &BarycenterWeights,
) -> Result<GaussianMeasure1D> {
    if measures.is_empty() {
        return Err(Error::EmptyMeasureSet);
    }
    if measures.len() != weights.len() {
        return Err(Error::DimensionMismatch(measures.len(), weights.len()));
    }
    let (mean, std) = measures
        .iter()
        .zip(weights.as_slice())
        .fold((0.0, 0.0), |(m, s), (g, w)| (m + w * g.mean, s + w * g.std));
    Ok(GaussianMeasure1D { mean, std })
}

/// The objective minimized by the barycenter: `sum w_i W2^2(candidate, measure_i)`.
pub fn barycenter_objective(
    candidate: &GaussianMeasure1D,
    measures: &[GaussianMeasure1D],
    weights: &BarycenterWeights,
) -> f64 {
    measures
        .iter()
        .zip(weights.as_slice())
        .map(|(g, w)| w * w2_squared_1d(candidate, g))
        .sum()
}

/// Principal square root of a symmetric PSD matrix via eigendecomposition.
/// Eigenvalues within tolerance of zero are clamped.
pub fn psd_sqrt(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    check_symmetric(m)?;
    let eigen = SymmetricEigen::new(m.clone());
    let scale = m.amax().max(1.0);
    let mut roots = eigen.eigenvalues.clone();
    for ev in roots.iter_mut() {
        if *ev < -PSD_TOLERANCE * scale {
            return Err(Error::InvalidCovariance(format!("negative eigenvalue {ev:e}")));
        }
        *ev = ev.max(0.0).sqrt();
    }
    let q = &eigen.eigenvectors;
    Ok(q * DMatrix::from_diagonal(&roots) * q.transpose())
}

fn check_symmetric(m: &DMatrix<f64>) -> Result<()> {
    if m.nrows() != m.ncols() {
        return Err(Error::InvalidCovariance(format!("matrix is {}x{}", m.nrows(), m.ncols())));
    }
    let scale = m.amax().max(1.0);
    for i in 0..m.nrows() {
        for j in 0..i {
            if (m[(i, j)] - m[(j, i)]).abs() > PSD_TOLERANCE * scale {
                return Err(Error::InvalidCovariance(format!("asymmetric at ({i}, {j})")));
            }
        }
    }
    Ok(())
}

fn check_psd(m: &DMatrix<f64>) -> Result<()> {
    psd_sqrt(m).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(m: f64, s: f64) -> GaussianMeasure1D {
        GaussianMeasure1D::new(m, s)
    }

    #[test]
    fn univariate_distance_examples() {
        assert_eq!(w2_squared_1d(&g(0.0, 1.0), &g(0.0, 1.0)), 0.0);
        assert_eq!(w2_squared_1d(&g(1.0, 2.0), &g(4.0, 6.0)), 25.0);
        assert!((w2_squared_1d(&g(0.5, 0.0), &g(0.5, 0.3)) - 0.09).abs() < 1e-15);
    }

    #[test]
    fn bures_commuting_scalars() {
        let a = DMatrix::identity(2, 2) * 4.0;
        let b = DMatrix::identity(2, 2) * 9.0;
        assert!((bures_squared(&a, &b).unwrap() - 2.0).abs() < 1e-12);
        assert!(bures_squared(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn bures_rejects_indefinite() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        let b = DMatrix::identity(2, 2);
        assert!(matches!(bures_squared(&a, &b), Err(Error::InvalidCovariance(_))));
    }

    #[test]
    fn nd_matches_1d() {
        let a = GaussianMeasureND::new(DVector::from_element(1, 1.0), DMatrix::from_element(1, 1, 4.0)).unwrap();
        let b = GaussianMeasureND::new(DVector::from_element(1, 4.0), DMatrix::from_element(1, 1, 36.0)).unwrap();
        assert!((w2_squared_nd(&a, &b).unwrap() - 25.0).abs() < 1e-10);
        assert!(w2_squared_nd(&a, &a).unwrap() < 1e-12);
    }

    #[test]
    fn nd_centered_reduces_to_bures() {
        let sa = DMatrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]);
        let sb = DMatrix::from_row_slice(2, 2, &[1.0, -0.2, -0.2, 3.0]);
        let a = GaussianMeasureND::new(DVector::zeros(2), sa.clone()).unwrap();
        let b = GaussianMeasureND::new(DVector::zeros(2), sb.clone()).unwrap();
        let lhs = w2_squared_nd(&a, &b).unwrap();
        assert!((lhs - bures_squared(&sa, &sb).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn nd_dimension_mismatch() {
        let a = GaussianMeasureND::new(DVector::zeros(1), DMatrix::identity(1, 1)).unwrap();
        let b = GaussianMeasureND::new(DVector::zeros(2), DMatrix::identity(2, 2)).unwrap();
        assert!(matches!(w2_squared_nd(&a, &b), Err(Error::DimensionMismatch(1, 2))));
    }

    #[test]
    fn barycenter_examples() {
        let w = BarycenterWeights::uniform(2).unwrap();
        assert_eq!(barycenter_1d(&[g(0.0, 1.0), g(2.0, 3.0)], &w).unwrap(), g(1.0, 2.0));

        let single = [g(0.3, 0.7)];
        let w = BarycenterWeights::uniform(1).unwrap();
        assert_eq!(barycenter_1d(&single, &w).unwrap(), single[0]);
    }

    #[test]
    fn barycenter_one_hot_is_exact() {
        let ms = [g(0.1, 0.2), g(-3.7, 1.9), g(5.5, 0.0)];
        for k in 0..3 {
            let w = BarycenterWeights::one_hot(3, k).unwrap();
            assert_eq!(barycenter_1d(&ms, &w).unwrap(), ms[k]);
        }
    }

    #[test]
    fn barycenter_errors() {
        let w = BarycenterWeights::uniform(2).unwrap();
        assert!(matches!(barycenter_1d(&[], &w), Err(Error::EmptyMeasureSet)));
        assert!(matches!(barycenter_1d(&[g(0.0, 1.0)], &w), Err(Error::DimensionMismatch(1, 2))));
    }

    #[test]
    fn weights_validation() {
        assert!(BarycenterWeights::new(vec![0.5, 0.4]).is_err());
        assert!(BarycenterWeights::new(vec![1.5, -0.5]).is_err());
        assert!(BarycenterWeights::new(vec![]).is_err());
        let w = BarycenterWeights::normalized(vec![1.0, 3.0]).unwrap();
        assert_eq!(w.as_slice(), &[0.25, 0.75]);
    }
}
