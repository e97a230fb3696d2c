//! Von Mises entropy estimation with sample splitting, the four-term
//! conditional-mutual-information estimator, and a plug-in quadrature
//! oracle for low dimension.
//!
//! The entropy estimator splits the rows with a seeded permutation, fits a
//! KDE on the first half, and averages -log p_h over the held-out half:
//!
//!   H_vm = -(1/n_eval) sum_i log p_h(x_i).
//!
//! Higher-order kernels make p_h signed. Evaluation points where the raw
//! estimate is non-positive contribute zero to the sum (the log is
//! undefined there; see `floor_hits` for how often it happens), and
//! positive values are clamped from below at the configured floor before
//! taking the log. Natural logarithms throughout, so values are in nats.

use log::warn;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::density::{fit_kde, BandwidthRule};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::samples::SampleMatrix;

/// Result of one Von Mises entropy estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct EntropyEstimate {
    /// Estimated entropy in nats.
    pub value: f64,
    pub n_total: usize,
    pub n_fit: usize,
    pub n_eval: usize,
    pub bandwidth_h: f64,
    pub beta: u32,
    /// Evaluation points whose raw density fell below the floor (including
    /// all non-positive evaluations). A floor-dominated estimate is suspect.
    pub floor_hits: usize,
}

/// The seeded fit/eval row split used by [`entropy_vm`]: a permutation of
/// 0..n with the first ceil(n/2) indices fitting the density and the rest
/// evaluating it. Exposed so callers can reconstruct exactly which rows a
/// given estimate trained on.
pub fn split_indices(n: usize, split_seed: u64) -> (Vec<usize>, Vec<usize>) {
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(split_seed);
    idx.shuffle(&mut rng);
    let n_fit = n.div_ceil(2);
    let eval = idx.split_off(n_fit);
    (idx, eval)
}

/// Von Mises entropy of the joint distribution of all columns of `samples`.
///
/// `exponent_dim` is the dimension used in the bandwidth exponent; for a
/// standalone estimate this is the data dimension, while the CMI terms pass
/// a shared value (see [`cmi_vm`]). The bandwidth uses the total row count.
pub fn entropy_vm(
    samples: &SampleMatrix,
    beta: u32,
    gamma: f64,
    exponent_dim: u32,
    floor: f64,
    split_seed: u64,
) -> Result<EntropyEstimate> {
    let n = samples.n_rows();
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    samples.check_finite()?;
    let (fit_idx, eval_idx) = split_indices(n, split_seed);
    entropy_vm_on_split(
        samples,
        &fit_idx,
        &eval_idx,
        beta,
        gamma,
        exponent_dim,
        floor,
    )
}

fn entropy_vm_on_split(
    samples: &SampleMatrix,
    fit_idx: &[usize],
    eval_idx: &[usize],
    beta: u32,
    gamma: f64,
    exponent_dim: u32,
    floor: f64,
) -> Result<EntropyEstimate> {
    let n = samples.n_rows();
    let d = samples.n_cols();
    let kernel = KernelSpec::new(beta, d)?;
    let rule = BandwidthRule::new(gamma, beta, exponent_dim)?;
    let fit = samples.select_rows(fit_idx);
    let est = fit_kde(fit, kernel, &rule, n, floor)?;

    let mut sum = 0.0;
    let mut floor_hits = 0usize;
    for &r in eval_idx {
        let raw = est.eval_raw_unchecked(samples.row(r));
        if raw < floor {
            floor_hits += 1;
        }
        if raw > 0.0 {
            sum += raw.max(floor).ln();
        }
    }
    Ok(EntropyEstimate {
        value: -sum / eval_idx.len() as f64,
        n_total: n,
        n_fit: fit_idx.len(),
        n_eval: eval_idx.len(),
        bandwidth_h: est.bandwidth(),
        beta,
        floor_hits,
    })
}

/// Plug-in entropy by tensor-grid midpoint quadrature of -p log p over a
/// box, with the integrand floored the same way evaluation floors the
/// density. A cross-check oracle for [`entropy_vm`] at d <= 2 only; the
/// grid cost is exponential in the dimension.
pub fn entropy_plugin_oracle<F>(
    density: F,
    domain_box: &[(f64, f64)],
    grid_points_per_axis: usize,
    floor: f64,
) -> Result<f64>
where
    F: Fn(&[f64]) -> f64,
{
    let d = domain_box.len();
    if d == 0 || d > 2 {
        return Err(Error::InvalidParameter(format!(
            "plug-in oracle supports dimensions 1 and 2, got {d}"
        )));
    }
    if grid_points_per_axis == 0 {
        return Err(Error::InvalidParameter("grid must be non-empty".into()));
    }
    for &(a, b) in domain_box {
        if a.is_nan() || b.is_nan() || b <= a {
            return Err(Error::InvalidParameter(format!(
                "degenerate domain interval [{a}, {b}]"
            )));
        }
    }
    let m = grid_points_per_axis;
    let mut total = 0.0;
    match d {
        1 => {
            let (a, b) = domain_box[0];
            let w = (b - a) / m as f64;
            for i in 0..m {
                let x = a + (i as f64 + 0.5) * w;
                let p = density(&[x]).max(floor);
                total += -p * p.ln() * w;
            }
        }
        _ => {
            let (a0, b0) = domain_box[0];
            let (a1, b1) = domain_box[1];
            let w0 = (b0 - a0) / m as f64;
            let w1 = (b1 - a1) / m as f64;
            for i in 0..m {
                let x = a0 + (i as f64 + 0.5) * w0;
                for j in 0..m {
                    let y = a1 + (j as f64 + 0.5) * w1;
                    let p = density(&[x, y]).max(floor);
                    total += -p * p.ln() * w0 * w1;
                }
            }
        }
    }
    Ok(total)
}

/// How the four CMI entropy terms pick their bandwidth exponents.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ExponentRule {
    /// All four terms use the exponent of the full (X, Y, Z) joint,
    /// 2 beta + 2 + d_z, i.e. one common bandwidth per sample size. This is
    /// what makes the four boundary and smoothing biases cancel in the
    /// difference, and is the default.
    #[default]
    SharedJoint,
    /// Each term uses its own marginal dimension: 2 + d_z for (X,Y,Z),
    /// 1 + d_z for (X,Z) and (Y,Z), d_z for (Z). Matches the rate-optimal
    /// per-term schedule; biases no longer cancel term-by-term.
    PerTerm,
}

/// The four-term CMI estimate I(X;Y|Z) = H(X,Z) + H(Y,Z) - H(Z) - H(X,Y,Z).
#[derive(Debug, Clone, PartialEq)]
pub struct CmiEstimate {
    /// h_xz.value + h_yz.value - h_z.value - h_xyz.value, exactly.
    pub value: f64,
    pub h_xz: EntropyEstimate,
    pub h_yz: EntropyEstimate,
    /// Absent when the conditioning set is empty; the term is identically 0
    /// and the estimator degenerates to three-term mutual information.
    pub h_z: Option<EntropyEstimate>,
    pub h_xyz: EntropyEstimate,
    pub d_z: usize,
}

/// Estimate I(X;Y|Z) by combining four entropy terms that share one seeded
/// fit/eval split, so the estimate is exactly symmetric under swapping X
/// and Y. Uses the default [`ExponentRule::SharedJoint`] bandwidths.
#[allow(clippy::too_many_arguments)]
pub fn cmi_vm(
    data: &SampleMatrix,
    x_col: &str,
    y_col: &str,
    z_cols: &[&str],
    beta: u32,
    gamma: f64,
    floor: f64,
    split_seed: u64,
) -> Result<CmiEstimate> {
    cmi_vm_with_exponents(
        data,
        x_col,
        y_col,
        z_cols,
        beta,
        gamma,
        floor,
        split_seed,
        ExponentRule::SharedJoint,
    )
}

/// [`cmi_vm`] with an explicit bandwidth-exponent rule.
#[allow(clippy::too_many_arguments)]
pub fn cmi_vm_with_exponents(
    data: &SampleMatrix,
    x_col: &str,
    y_col: &str,
    z_cols: &[&str],
    beta: u32,
    gamma: f64,
    floor: f64,
    split_seed: u64,
    exponents: ExponentRule,
) -> Result<CmiEstimate> {
    if x_col == y_col {
        return Err(Error::InvalidParameter(format!(
            "x and y must differ, both are `{x_col}`"
        )));
    }
    if z_cols.contains(&x_col) || z_cols.contains(&y_col) {
        return Err(Error::InvalidParameter(
            "conditioning set must not contain x or y".into(),
        ));
    }
    let xi = data.column_index(x_col)?;
    let yi = data.column_index(y_col)?;
    let zi: Vec<usize> = z_cols
        .iter()
        .map(|z| data.column_index(z))
        .collect::<Result<_>>()?;
    let n = data.n_rows();
    if n < 4 {
        return Err(Error::TooFewSamples { needed: 4, got: n });
    }
    data.check_finite()?;

    let d_z = zi.len();
    if f64::from(beta) <= 1.0 + d_z as f64 / 2.0 {
        warn!(
            "kernel order beta = {beta} does not exceed 1 + d_z/2 = {}; the estimator \
             remains defined but converges more slowly",
            1.0 + d_z as f64 / 2.0
        );
    }

    let (e_xz, e_yz, e_z, e_xyz) = match exponents {
        ExponentRule::SharedJoint => {
            let e = 2 + d_z as u32;
            (e, e, e, e)
        }
        ExponentRule::PerTerm => (1 + d_z as u32, 1 + d_z as u32, d_z as u32, 2 + d_z as u32),
    };

    // One permutation shared by all four terms.
    let (fit_idx, eval_idx) = split_indices(n, split_seed);

    let mut cols_xz = vec![xi];
    cols_xz.extend(&zi);
    let mut cols_yz = vec![yi];
    cols_yz.extend(&zi);
    let mut cols_xyz = vec![xi, yi];
    cols_xyz.extend(&zi);

    let term = |cols: &[usize], exp_dim: u32| -> Result<EntropyEstimate> {
        let sub = data.select(cols);
        entropy_vm_on_split(&sub, &fit_idx, &eval_idx, beta, gamma, exp_dim, floor)
    };

    let h_xz = term(&cols_xz, e_xz)?;
    let h_yz = term(&cols_yz, e_yz)?;
    let h_z = if d_z > 0 { Some(term(&zi, e_z)?) } else { None };
    let h_xyz = term(&cols_xyz, e_xyz)?;

    let value = h_xz.value + h_yz.value - h_z.as_ref().map_or(0.0, |t| t.value) - h_xyz.value;
    Ok(CmiEstimate {
        value,
        h_xz,
        h_yz,
        h_z,
        h_xyz,
        d_z,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn uniform_matrix(names: &[&str], n: usize, seed: u64) -> SampleMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data: Vec<f64> = (0..n * names.len()).map(|_| rng.gen::<f64>()).collect();
        SampleMatrix::new(names.iter().map(|s| s.to_string()).collect(), data).unwrap()
    }

    #[test]
    fn split_is_balanced_and_seeded() {
        let (f, e) = split_indices(101, 9);
        assert_eq!(f.len(), 51);
        assert_eq!(e.len(), 50);
        let mut all: Vec<usize> = f.iter().chain(&e).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..101).collect::<Vec<_>>());
        let (f2, e2) = split_indices(101, 9);
        assert_eq!(f, f2);
        assert_eq!(e, e2);
        let (f3, _) = split_indices(101, 10);
        assert_ne!(f, f3);
    }

    #[test]
    fn entropy_rejects_tiny_or_bad_input() {
        let m = uniform_matrix(&["x"], 2, 0);
        assert!(matches!(
            entropy_vm(&m, 3, 0.35, 1, 1e-6, 0),
            Err(Error::TooFewSamples { .. })
        ));
        let bad = SampleMatrix::new(vec!["x".into()], vec![0.1, f64::NAN, 0.2, 0.3]).unwrap();
        assert!(entropy_vm(&bad, 3, 0.35, 1, 1e-6, 0).is_err());
    }

    #[test]
    fn entropy_is_deterministic_in_seed() {
        let m = uniform_matrix(&["x", "y"], 200, 3);
        let a = entropy_vm(&m, 3, 0.35, 2, 1e-6, 42).unwrap();
        let b = entropy_vm(&m, 3, 0.35, 2, 1e-6, 42).unwrap();
        assert_eq!(a, b);
        let c = entropy_vm(&m, 3, 0.35, 2, 1e-6, 43).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn plugin_oracle_uniform_is_zero() {
        let h = entropy_plugin_oracle(|_| 1.0, &[(0.0, 1.0)], 1000, 1e-12).unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn plugin_oracle_half_interval() {
        let h = entropy_plugin_oracle(|_| 2.0, &[(0.0, 0.5)], 1000, 1e-12).unwrap();
        assert_abs_diff_eq!(h, -std::f64::consts::LN_2, epsilon = 1e-12);
    }

    #[test]
    fn plugin_oracle_power_law_closed_form() {
        let a = 4.15;
        let h = entropy_plugin_oracle(|x| a * x[0].powf(a - 1.0), &[(0.0, 1.0)], 10_000, 1e-12)
            .unwrap();
        let closed = -a.ln() + (a - 1.0) / a;
        assert_abs_diff_eq!(closed, -0.6640721896642937, epsilon = 1e-12);
        assert_abs_diff_eq!(h, closed, epsilon = 1e-3);
    }

    #[test]
    fn plugin_oracle_rejects_high_dimension() {
        assert!(entropy_plugin_oracle(|_| 1.0, &[(0.0, 1.0); 3], 10, 1e-6).is_err());
        assert!(entropy_plugin_oracle(|_| 1.0, &[], 10, 1e-6).is_err());
    }

    #[test]
    fn plugin_oracle_2d_uniform() {
        let h = entropy_plugin_oracle(|_| 1.0, &[(0.0, 1.0), (0.0, 1.0)], 200, 1e-12).unwrap();
        assert_abs_diff_eq!(h, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn cmi_identity_holds_exactly() {
        let m = uniform_matrix(&["x", "y", "z1", "z2"], 120, 17);
        let est = cmi_vm(&m, "x", "y", &["z1", "z2"], 3, 0.35, 1e-6, 5).unwrap();
        let recombined =
            est.h_xz.value + est.h_yz.value - est.h_z.as_ref().unwrap().value - est.h_xyz.value;
        assert_eq!(est.value, recombined);
        assert_eq!(est.d_z, 2);
    }

    #[test]
    fn cmi_symmetric_in_x_and_y() {
        let m = uniform_matrix(&["x", "y", "z"], 150, 23);
        let a = cmi_vm(&m, "x", "y", &["z"], 3, 0.35, 1e-6, 77).unwrap();
        let b = cmi_vm(&m, "y", "x", &["z"], 3, 0.35, 1e-6, 77).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.h_xz, b.h_yz);
        assert_eq!(a.h_yz, b.h_xz);
        assert_eq!(a.h_xyz.value, b.h_xyz.value);
    }

    #[test]
    fn cmi_empty_z_degenerates_to_mi() {
        let m = uniform_matrix(&["x", "y"], 100, 31);
        let est = cmi_vm(&m, "x", "y", &[], 3, 0.35, 1e-6, 1).unwrap();
        assert!(est.h_z.is_none());
        assert_eq!(est.d_z, 0);
        assert_eq!(est.value, est.h_xz.value + est.h_yz.value - est.h_xyz.value);
    }

    #[test]
    fn cmi_rejects_bad_columns() {
        let m = uniform_matrix(&["x", "y", "z"], 50, 2);
        assert!(cmi_vm(&m, "x", "x", &[], 3, 0.35, 1e-6, 0).is_err());
        assert!(cmi_vm(&m, "x", "y", &["x"], 3, 0.35, 1e-6, 0).is_err());
        assert!(cmi_vm(&m, "x", "w", &[], 3, 0.35, 1e-6, 0).is_err());
    }

    #[test]
    fn per_term_exponents_differ_from_shared() {
        let m = uniform_matrix(&["x", "y", "z"], 200, 8);
        let shared = cmi_vm_with_exponents(
            &m,
            "x",
            "y",
            &["z"],
            3,
            0.35,
            1e-6,
            4,
            ExponentRule::SharedJoint,
        )
        .unwrap();
        let per_term = cmi_vm_with_exponents(
            &m,
            "x",
            "y",
            &["z"],
            3,
            0.35,
            1e-6,
            4,
            ExponentRule::PerTerm,
        )
        .unwrap();
        assert_eq!(
            shared.h_xz.bandwidth_h,
            shared.h_z.as_ref().unwrap().bandwidth_h
        );
        assert_eq!(shared.h_xz.bandwidth_h, shared.h_xyz.bandwidth_h);
        // larger joint dimension -> milder exponent -> wider bandwidth
        assert!(per_term.h_xyz.bandwidth_h > per_term.h_xz.bandwidth_h);
        assert!(per_term.h_z.as_ref().unwrap().bandwidth_h < per_term.h_xz.bandwidth_h);
        assert_ne!(shared.value, per_term.value);
    }

    #[test]
    fn floor_hits_bounded_by_eval_count() {
        let m = uniform_matrix(&["x", "y", "z1", "z2"], 80, 5);
        let est = cmi_vm(&m, "x", "y", &["z1", "z2"], 3, 0.35, 1e-6, 9).unwrap();
        for t in [&est.h_xz, &est.h_yz, est.h_z.as_ref().unwrap(), &est.h_xyz] {
            assert!(t.floor_hits <= t.n_eval);
            assert_eq!(t.n_fit + t.n_eval, t.n_total);
            assert!(t.n_fit - t.n_eval <= 1);
        }
    }

    #[test]
    fn low_order_kernel_warns_but_still_estimates() {
        // beta = 1 with one conditioning variable is below the smoothness
        // bar (1 <= 1 + 1/2); the estimator stays defined.
        let m = uniform_matrix(&["x", "y", "z"], 120, 6);
        let est = cmi_vm(&m, "x", "y", &["z"], 1, 0.35, 1e-6, 3).unwrap();
        assert!(est.value.is_finite());
        assert_eq!(est.h_xz.beta, 1);
    }
}
