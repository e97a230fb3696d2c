//! Conditional independence testing: the VM-CI test built on the
//! conditional-mutual-information estimator, and a Gaussian partial
//! correlation baseline. Both conform to one tester interface consumed by
//! the discovery algorithms.

use crate::error::{Error, Result};
use crate::estimators::{cmi_vm_with_exponents, ExponentRule};
use crate::samples::SampleMatrix;
use crate::seed;

/// Outcome of one conditional independence test.
#[derive(Debug, Clone, PartialEq)]
pub struct CiDecision {
    /// The test statistic: the CMI estimate for VM-CI, the signed Fisher z
    /// for the Gaussian baseline, 0/1 for the oracle.
    pub statistic: f64,
    /// The decision threshold the statistic was compared against.
    pub threshold: f64,
    pub independent: bool,
    pub n_used: usize,
    pub tester_name: String,
}

/// Parameters shared by the testers.
#[derive(Debug, Clone, PartialEq)]
pub struct CiTesterConfig {
    /// Assumed minimum dependence level; the VM-CI threshold is i_min / 2.
    pub i_min: f64,
    pub beta: u32,
    pub gamma: f64,
    pub floor: f64,
    /// Significance level of the Gaussian baseline.
    pub alpha: f64,
    /// Root seed; each query derives its split seed from this and the
    /// queried columns.
    pub base_seed: u64,
    pub exponents: ExponentRule,
}

impl Default for CiTesterConfig {
    fn default() -> Self {
        Self {
            i_min: 0.11,
            beta: 3,
            gamma: 0.35,
            floor: 1e-6,
            alpha: 0.05,
            base_seed: 0,
            exponents: ExponentRule::SharedJoint,
        }
    }
}

impl CiTesterConfig {
    pub fn validate(&self) -> Result<()> {
        if self.i_min.is_nan() || self.i_min <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "i_min must be positive, got {}",
                self.i_min
            )));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        Ok(())
    }
}

/// Common interface for CI testers; implemented by VM-CI, the Gaussian
/// baseline, and the d-separation oracle.
pub trait CiTester: Sync {
    fn test(&self, x: &str, y: &str, z: &[&str]) -> Result<CiDecision>;
    fn name(&self) -> &'static str;
}

/// Split seed for a query, symmetric in {x, y} and independent of the
/// order of z, so the same question always receives the same answer
/// within one discovery run.
fn query_seed(base_seed: u64, x: &str, y: &str, z: &[&str]) -> u64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let mut parts = vec![
        seed::hash_bytes(lo.as_bytes()),
        seed::hash_bytes(hi.as_bytes()),
    ];
    let mut zs: Vec<&str> = z.to_vec();
    zs.sort_unstable();
    parts.extend(zs.iter().map(|s| seed::hash_bytes(s.as_bytes())));
    seed::derive(base_seed, &parts)
}

/// The VM-CI test: estimate I(X;Y|Z) by the Von Mises estimator and declare
/// dependence when the estimate exceeds i_min / 2. Ties are accepted as
/// independent.
pub fn vm_ci_test(
    data: &SampleMatrix,
    x: &str,
    y: &str,
    z: &[&str],
    config: &CiTesterConfig,
) -> Result<CiDecision> {
    config.validate()?;
    let split_seed = query_seed(config.base_seed, x, y, z);
    let est = cmi_vm_with_exponents(
        data,
        x,
        y,
        z,
        config.beta,
        config.gamma,
        config.floor,
        split_seed,
        config.exponents,
    )?;
    let threshold = config.i_min / 2.0;
    Ok(CiDecision {
        statistic: est.value,
        threshold,
        independent: est.value <= threshold,
        n_used: data.n_rows(),
        tester_name: "vm_ci".to_string(),
    })
}

/// Standard Gaussian CI baseline: partial correlation of X and Y given Z,
/// Fisher z-transformed and compared two-sided against the normal critical
/// value at level alpha.
pub fn gaussian_pc_test(
    data: &SampleMatrix,
    x: &str,
    y: &str,
    z: &[&str],
    alpha: f64,
) -> Result<CiDecision> {
    if alpha.is_nan() || alpha <= 0.0 || alpha >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if x == y {
        return Err(Error::InvalidParameter(format!(
            "x and y must differ, both are `{x}`"
        )));
    }
    let n = data.n_rows();
    let k = z.len();
    if n <= k + 3 {
        return Err(Error::TooFewSamples {
            needed: k + 4,
            got: n,
        });
    }
    data.check_finite()?;
    let mut cols = vec![data.column_index(x)?, data.column_index(y)?];
    for zc in z {
        cols.push(data.column_index(zc)?);
    }
    let r = partial_correlation(data, &cols)?;
    // Fisher z with the conditioning-set degrees-of-freedom correction.
    let stat = 0.5 * ((1.0 + r) / (1.0 - r)).ln() * ((n - k - 3) as f64).sqrt();
    let crit = inverse_normal_cdf(1.0 - alpha / 2.0);
    Ok(CiDecision {
        statistic: stat,
        threshold: crit,
        independent: stat.abs() <= crit,
        n_used: n,
        tester_name: "gaussian_pc".to_string(),
    })
}

/// Partial correlation of the first two of `cols` given the rest, from the
/// inverse of their correlation matrix.
#[allow(clippy::needless_range_loop)]
fn partial_correlation(data: &SampleMatrix, cols: &[usize]) -> Result<f64> {
    let p = cols.len();
    let n = data.n_rows();
    let means: Vec<f64> = cols
        .iter()
        .map(|&c| (0..n).map(|r| data.value(r, c)).sum::<f64>() / n as f64)
        .collect();
    let mut cov = vec![vec![0.0; p]; p];
    for r in 0..n {
        for i in 0..p {
            let di = data.value(r, cols[i]) - means[i];
            for j in i..p {
                cov[i][j] += di * (data.value(r, cols[j]) - means[j]);
            }
        }
    }
    for i in 0..p {
        for j in (i + 1)..p {
            cov[j][i] = cov[i][j];
        }
    }
    // Normalize to a correlation matrix; a zero variance is singular.
    let sd: Vec<f64> = (0..p).map(|i| cov[i][i].sqrt()).collect();
    if sd.iter().any(|&s| s.is_nan() || s <= 0.0) {
        return Err(Error::SingularCovariance);
    }
    let mut corr = vec![vec![0.0; p]; p];
    for i in 0..p {
        for j in 0..p {
            corr[i][j] = cov[i][j] / (sd[i] * sd[j]);
        }
    }
    if p == 2 {
        // No conditioning set: plain correlation, which may legitimately
        // be +-1 (the precision-matrix route would call that singular).
        return Ok(corr[0][1].clamp(-1.0, 1.0));
    }
    let precision = invert(corr)?;
    let denom = (precision[0][0] * precision[1][1]).sqrt();
    if denom.is_nan() || denom <= 0.0 || denom.is_infinite() {
        return Err(Error::SingularCovariance);
    }
    let r = -precision[0][1] / denom;
    Ok(r.clamp(-1.0, 1.0))
}

/// Gauss-Jordan inverse with partial pivoting; the matrices here are tiny
/// (2 + |z| square).
fn invert(mut a: Vec<Vec<f64>>) -> Result<Vec<Vec<f64>>> {
    let p = a.len();
    let mut inv = vec![vec![0.0; p]; p];
    for (i, row) in inv.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    for col in 0..p {
        let pivot_row = (col..p)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < 1e-12 {
            return Err(Error::SingularCovariance);
        }
        a.swap(col, pivot_row);
        inv.swap(col, pivot_row);
        let pivot = a[col][col];
        for j in 0..p {
            a[col][j] /= pivot;
            inv[col][j] /= pivot;
        }
        for i in 0..p {
            if i != col {
                let factor = a[i][col];
                for j in 0..p {
                    a[i][j] -= factor * a[col][j];
                    inv[i][j] -= factor * inv[col][j];
                }
            }
        }
    }
    Ok(inv)
}

/// Inverse standard normal CDF (Acklam's rational approximation, absolute
/// error below 1.2e-9 over (0, 1)).
pub(crate) fn inverse_normal_cdf(p: f64) -> f64 {
    assert!(p > 0.0 && p < 1.0, "quantile argument must be in (0, 1)");
    const A: [f64; 6] = [
        -3.969683028665376e+01,
        2.209460984245205e+02,
        -2.759285104469687e+02,
        1.38357751867269e+02,
        -3.066479806614716e+01,
        2.506628277459239e+00,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e+01,
        1.615858368580409e+02,
        -1.556989798598866e+02,
        6.680131188771972e+01,
        -1.328068155288572e+01,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-03,
        -3.223964580411365e-01,
        -2.400758277161838e+00,
        -2.549732539343734e+00,
        4.374664141464968e+00,
        2.938163982698783e+00,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-03,
        3.224671290700398e-01,
        2.445134137142996e+00,
        3.754408661907416e+00,
    ];
    const P_LOW: f64 = 0.02425;
    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

/// VM-CI as a reusable tester over one dataset.
pub struct VmCiTester<'a> {
    data: &'a SampleMatrix,
    config: CiTesterConfig,
}

impl<'a> VmCiTester<'a> {
    pub fn new(data: &'a SampleMatrix, config: CiTesterConfig) -> Self {
        Self { data, config }
    }
}

impl CiTester for VmCiTester<'_> {
    fn test(&self, x: &str, y: &str, z: &[&str]) -> Result<CiDecision> {
        vm_ci_test(self.data, x, y, z, &self.config)
    }

    fn name(&self) -> &'static str {
        "vm_ci"
    }
}

/// The Gaussian baseline as a reusable tester over one dataset.
pub struct GaussianPcTester<'a> {
    data: &'a SampleMatrix,
    alpha: f64,
}

impl<'a> GaussianPcTester<'a> {
    pub fn new(data: &'a SampleMatrix, alpha: f64) -> Self {
        Self { data, alpha }
    }
}

impl CiTester for GaussianPcTester<'_> {
    fn test(&self, x: &str, y: &str, z: &[&str]) -> Result<CiDecision> {
        gaussian_pc_test(self.data, x, y, z, self.alpha)
    }

    fn name(&self) -> &'static str {
        "gaussian_pc"
    }
}
