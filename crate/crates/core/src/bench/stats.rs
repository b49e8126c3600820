//! Summary statistics and the paired Wilcoxon signed-rank test.

use statrs::function::erf::erfc;

use crate::error::{Error, Result};

/// Largest effective sample size handled with the exact null distribution.
pub const EXACT_LIMIT: usize = 25;
/// Smallest number of pairs accepted by [`wilcoxon_paired`].
pub const MIN_PAIRS: usize = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WilcoxonMethod {
    Exact,
    NormalApprox,
    /// Every difference was zero.
    Degenerate,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WilcoxonResult {
    /// Two-sided p-value.
    pub p_value: f64,
    /// Sum of the ranks of the positive differences `a - b`.
    pub w_plus: f64,
    /// Pairs left after dropping zero differences.
    pub n_effective: usize,
    pub method: WilcoxonMethod,
}

impl WilcoxonResult {
    pub fn is_degenerate(&self) -> bool {
        self.method == WilcoxonMethod::Degenerate
    }
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample standard deviation (`n - 1` denominator); zero for fewer than two values.
pub fn std_dev(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    (ss / (xs.len() - 1) as f64).sqrt()
}

/// Midranks of `values` (1-based), doubled so that they are integers.
fn doubled_midranks(values: &[f64]) -> Vec<u64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut ranks = vec![0u64; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start+1 ..= end share rank (start + 1 + end) / 2
        let doubled = (start + 1 + end) as u64;
        for &k in &order[start..end] {
            ranks[k] = doubled;
        }
        start = end;
    }
    ranks
}

/// Two-sided Wilcoxon signed-rank test on the differences `a - b`.
///
/// Zero differences are dropped. With at most [`EXACT_LIMIT`] remaining
/// pairs the p-value comes from the exact permutation distribution of the
/// (mid)rank sum; above that a tie-corrected normal approximation with
/// continuity correction is used.
pub fn wilcoxon_paired(a: &[f64], b: &[f64]) -> Result<WilcoxonResult> {
    if a.len() != b.len() {
        return Err(Error::UnpairedSamples(a.len(), b.len()));
    }
    if a.len() < MIN_PAIRS {
        return Err(Error::TooFewSamples { needed: MIN_PAIRS, got: a.len() });
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).filter(|d| *d != 0.0).collect();
    let n = diffs.len();
    if n == 0 {
        return Ok(WilcoxonResult { p_value: 1.0, w_plus: 0.0, n_effective: 0, method: WilcoxonMethod::Degenerate });
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = doubled_midranks(&abs);
    let w_plus_doubled: u64 = ranks.iter().zip(&diffs).filter(|(_, d)| **d > 0.0).map(|(r, _)| *r).sum();
    let w_plus = w_plus_doubled as f64 / 2.0;

    if n <= EXACT_LIMIT {
        let total: u64 = ranks.iter().sum();
        // counts[s] = number of sign patterns whose doubled positive-rank sum is s
        let mut counts = vec![0f64; total as usize + 1];
        counts[0] = 1.0;
        let mut reach = 0usize;
        for &r in &ranks {
            let r = r as usize;
            for s in (0..=reach).rev() {
                if counts[s] != 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let patterns = 2f64.powi(n as i32);
        let obs = w_plus_doubled as usize;
        let lower: f64 = counts[..=obs].iter().sum::<f64>() / patterns;
        let upper: f64 = counts[obs..].iter().sum::<f64>() / patterns;
        let p_value = (2.0 * lower.min(upper)).min(1.0);
        return Ok(WilcoxonResult { p_value, w_plus, n_effective: n, method: WilcoxonMethod::Exact });
    }

    let nf = n as f64;
    let expected = nf * (nf + 1.0) / 4.0;
    let mut tie_term = 0.0;
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i + 1;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let t = (j - i) as f64;
        tie_term += t * t * t - t;
        i = j;
    }
    let variance = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let p_value = if variance <= 0.0 {
        1.0
    } else {
        let z = ((w_plus - expected).abs() - 0.5).max(0.0) / variance.sqrt();
        erfc(z / std::f64::consts::SQRT_2).min(1.0)
    };
    Ok(WilcoxonResult { p_value, w_plus, n_effective: n, method: WilcoxonMethod::NormalApprox })
}
