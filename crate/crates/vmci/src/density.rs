//! Multivariate kernel density estimation over a designated fit half of the
//! samples, with the power-law bandwidth schedule h = gamma * n^(-1/(2 beta + d_e)).
//!
//! The estimate at a point q is the direct sum
//!
//!   p_h(q) = (1/n_fit) sum_i (1/h^d) K_d((x_i - q) / h),
//!
//! evaluated in O(n_fit * d) per query with no tree or FFT acceleration, so
//! the quadratic cost of downstream estimators stays measurable. Higher-order
//! kernels take negative values; [`DensityEstimate::eval`] clamps the result
//! from below while [`DensityEstimate::eval_raw`] exposes the signed sum.

use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::samples::SampleMatrix;

/// Bandwidth schedule h(n) = gamma * n^(-1 / (2 beta + exponent_dim)).
///
/// `exponent_dim` is the dimension entering the exponent, which an estimator
/// may set differently from the data dimension of an individual term (the
/// conditional-MI terms share the exponent of their largest joint).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandwidthRule {
    pub gamma: f64,
    pub beta: u32,
    pub exponent_dim: u32,
}

impl BandwidthRule {
    pub fn new(gamma: f64, beta: u32, exponent_dim: u32) -> Result<Self> {
        if gamma.is_nan() || gamma <= 0.0 || gamma.is_infinite() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth prefactor gamma must be positive, got {gamma}"
            )));
        }
        if beta == 0 || beta.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "bandwidth beta must be a positive odd integer, got {beta}"
            )));
        }
        Ok(Self {
            gamma,
            beta,
            exponent_dim,
        })
    }

    /// h(n) for a total sample count n >= 1.
    pub fn bandwidth(&self, n: usize) -> f64 {
        compute_bandwidth(self, n)
    }
}

/// h = gamma * n^(-1/(2 beta + exponent_dim)); positive and decreasing in n.
pub fn compute_bandwidth(rule: &BandwidthRule, n: usize) -> f64 {
    let exponent = -1.0 / (2.0 * f64::from(rule.beta) + f64::from(rule.exponent_dim));
    rule.gamma * (n as f64).powf(exponent)
}

/// A fitted kernel density estimate: retained fit samples, bandwidth,
/// kernel, and evaluation floor. Immutable after fitting; evaluation is
/// pure and safe to share across threads.
#[derive(Debug, Clone)]
pub struct DensityEstimate {
    fit_samples: SampleMatrix,
    kernel: KernelSpec,
    bandwidth_h: f64,
    density_floor: f64,
}

/// Fit a KDE on `samples` (the retained half; splitting is the caller's
/// job). The bandwidth is computed from `n_total`, the sample count before
/// halving, as the schedule is stated in terms of the full n.
pub fn fit_kde(
    samples: SampleMatrix,
    kernel: KernelSpec,
    rule: &BandwidthRule,
    n_total: usize,
    floor: f64,
) -> Result<DensityEstimate> {
    if samples.n_rows() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: samples.n_rows(),
        });
    }
    if kernel.dim() != samples.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: kernel.dim(),
            got: samples.n_cols(),
        });
    }
    if floor.is_nan() || floor <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "density floor must be positive, got {floor}"
        )));
    }
    samples.check_finite()?;
    let bandwidth_h = compute_bandwidth(rule, n_total.max(1));
    Ok(DensityEstimate {
        fit_samples: samples,
        kernel,
        bandwidth_h,
        density_floor: floor,
    })
}

impl DensityEstimate {
    pub fn fit_samples(&self) -> &SampleMatrix {
        &self.fit_samples
    }

    pub fn kernel(&self) -> &KernelSpec {
        &self.kernel
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth_h
    }

    pub fn floor(&self) -> f64 {
        self.density_floor
    }

    /// Floored estimate max(floor, p_h(point)).
    pub fn eval(&self, point: &[f64]) -> Result<f64> {
        Ok(self.eval_raw(point)?.max(self.density_floor))
    }

    /// The signed sum of Eq.-style kernel terms, no floor applied.
    pub fn eval_raw(&self, point: &[f64]) -> Result<f64> {
        let d = self.kernel.dim();
        if point.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: point.len(),
            });
        }
        Ok(self.eval_raw_unchecked(point))
    }

    /// Hot path shared with the entropy estimator: the caller guarantees
    /// `point.len() == dim`. Terms whose first out-of-support coordinate is
    /// found are skipped, which changes nothing in the sum (the product is
    /// exactly zero) but avoids most kernel work.
    pub(crate) fn eval_raw_unchecked(&self, point: &[f64]) -> f64 {
        let d = self.kernel.dim();
        let inv_h = 1.0 / self.bandwidth_h;
        let n_fit = self.fit_samples.n_rows();
        let mut sum = 0.0;
        'rows: for r in 0..n_fit {
            let row = self.fit_samples.row(r);
            let mut prod = 1.0;
            for j in 0..d {
                let u = (row[j] - point[j]) * inv_h;
                if u.abs() > 1.0 {
                    continue 'rows;
                }
                prod *= self.kernel.eval_1d_in_support(u);
            }
            sum += prod;
        }
        sum / (n_fit as f64 * self.bandwidth_h.powi(d as i32))
    }
}
