//! Legendre kernels of prescribed order and their product extensions.
//!
//! The one-dimensional kernel of order beta is built from the orthonormal
//! Legendre basis phi_m on [-1, 1]:
//!
//!   K_beta(x) = sum_{m=0}^{beta} phi_m(0) phi_m(x)   for |x| <= 1, else 0,
//!
//! where phi_m(x) = sqrt((2m+1)/2) P_m(x) and P_m is the ordinary Legendre
//! polynomial. Odd-index terms vanish at zero, so K_{2l} = K_{2l+1}; the
//! order parameter is restricted to odd values so that the declared order
//! is exact. The d-dimensional kernel is the product of d identical
//! one-dimensional factors and inherits the order.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

/// Ordinary Legendre polynomial P_m(x) by the three-term recurrence.
fn legendre_p(m: u32, x: f64) -> f64 {
    match m {
        0 => 1.0,
        1 => x,
        _ => {
            let mut p_prev = 1.0;
            let mut p = x;
            for k in 1..m {
                let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
                p_prev = p;
                p = p_next;
            }
            p
        }
    }
}

/// Orthonormal Legendre basis function phi_m(x) = sqrt((2m+1)/2) P_m(x),
/// with phi_0 = 1/sqrt(2). Orthonormal on [-1, 1]; defined on all reals.
pub fn legendre_phi(m: u32, x: f64) -> f64 {
    ((2 * m + 1) as f64 / 2.0).sqrt() * legendre_p(m, x)
}

/// A Legendre product kernel: odd order `beta` and factor count `dim`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSpec {
    order_beta: u32,
    dim: usize,
    /// coeffs[m] = phi_m(0) * sqrt((2m+1)/2) = ((2m+1)/2) * P_m(0);
    /// zero for odd m.
    coeffs: Vec<f64>,
}

impl KernelSpec {
    /// `order_beta` must be odd and >= 1; `dim` >= 1.
    pub fn new(order_beta: u32, dim: usize) -> Result<Self> {
        if order_beta == 0 || order_beta.is_multiple_of(2) {
            return Err(Error::InvalidParameter(format!(
                "kernel order beta must be a positive odd integer, got {order_beta}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter(
                "kernel dimension must be at least 1".into(),
            ));
        }
        let coeffs = (0..=order_beta)
            .map(|m| (2 * m + 1) as f64 / 2.0 * legendre_p(m, 0.0))
            .collect();
        Ok(Self {
            order_beta,
            dim,
            coeffs,
        })
    }

    pub fn order_beta(&self) -> u32 {
        self.order_beta
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// One-dimensional kernel K_beta(x); exactly zero outside [-1, 1].
    pub fn eval_1d(&self, x: f64) -> f64 {
        if x.abs() > 1.0 {
            return 0.0;
        }
        self.eval_1d_in_support(x)
    }

    /// K_beta(x) assuming |x| <= 1. Single recurrence pass accumulating the
    /// even-index terms; the hot path of density evaluation.
    #[inline]
    pub(crate) fn eval_1d_in_support(&self, x: f64) -> f64 {
        let mut acc = self.coeffs[0];
        if self.order_beta >= 2 {
            let mut p_prev = 1.0;
            let mut p = x;
            for k in 1..self.order_beta {
                let p_next = ((2 * k + 1) as f64 * x * p - k as f64 * p_prev) / (k + 1) as f64;
                p_prev = p;
                p = p_next;
                if (k + 1).is_multiple_of(2) {
                    acc += self.coeffs[(k + 1) as usize] * p;
                }
            }
        }
        acc
    }

    /// Product kernel over a point of length `dim`.
    pub fn eval_product(&self, point: &[f64]) -> Result<f64> {
        if point.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: point.len(),
            });
        }
        let mut acc = 1.0;
        for &x in point {
            if x.abs() > 1.0 {
                return Ok(0.0);
            }
            acc *= self.eval_1d_in_support(x);
        }
        Ok(acc)
    }

    /// Quadrature of x^s K_beta(x) over [-1, 1]. The integrand is a
    /// polynomial of degree s + beta, so any rule with enough points is
    /// exact up to rounding; used as the order test oracle.
    pub fn moment(&self, s: u32, quadrature_points: usize) -> f64 {
        let rule = GaussLegendre::new(quadrature_points);
        rule.integrate(|x| x.powi(s as i32) * self.eval_1d_in_support(x))
    }

    /// Points sufficient to integrate degree 2 beta + 2 exactly.
    pub fn default_quadrature_points(&self) -> usize {
        (self.order_beta as usize + 2).max(4)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn phi_matches_known_values() {
        assert_abs_diff_eq!(legendre_phi(0, 0.7), 1.0 / 2.0f64.sqrt(), epsilon = 1e-15);
        assert_abs_diff_eq!(legendre_phi(1, 0.5), (1.5f64).sqrt() * 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(
            legendre_phi(2, 0.0),
            -(2.5f64).sqrt() / 2.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn phi_matches_symbolic_expansion_up_to_m4() {
        // phi_3(x) = sqrt(7/2) (5x^3 - 3x)/2, phi_4(x) = sqrt(9/2) (35x^4 - 30x^2 + 3)/8
        for &x in &[-0.9, -0.3, 0.0, 0.4, 1.0] {
            assert_abs_diff_eq!(legendre_phi(0, x), (0.5f64).sqrt(), epsilon = 1e-14);
            assert_abs_diff_eq!(legendre_phi(1, x), (1.5f64).sqrt() * x, epsilon = 1e-14);
            assert_abs_diff_eq!(
                legendre_phi(2, x),
                (2.5f64).sqrt() * (3.0 * x * x - 1.0) / 2.0,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                legendre_phi(3, x),
                (3.5f64).sqrt() * (5.0 * x.powi(3) - 3.0 * x) / 2.0,
                epsilon = 1e-14
            );
            assert_abs_diff_eq!(
                legendre_phi(4, x),
                (4.5f64).sqrt() * (35.0 * x.powi(4) - 30.0 * x * x + 3.0) / 8.0,
                epsilon = 1e-13
            );
        }
    }

    #[test]
    fn phi_orthonormal_under_quadrature() {
        let rule = GaussLegendre::new(16);
        for i in 0..=7u32 {
            for j in 0..=7u32 {
                let v = rule.integrate(|x| legendre_phi(i, x) * legendre_phi(j, x));
                let expect = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(v, expect, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn even_beta_rejected() {
        assert!(KernelSpec::new(2, 1).is_err());
        assert!(KernelSpec::new(0, 1).is_err());
        assert!(KernelSpec::new(1, 0).is_err());
        assert!(KernelSpec::new(7, 3).is_ok());
    }

    #[test]
    fn kernel_1d_examples() {
        let k3 = KernelSpec::new(3, 1).unwrap();
        assert_eq!(k3.eval_1d(1.5), 0.0);
        assert_eq!(k3.eval_1d(-1.0000001), 0.0);
        let k1 = KernelSpec::new(1, 1).unwrap();
        assert_abs_diff_eq!(k1.eval_1d(0.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn kernel_1d_is_even() {
        let k = KernelSpec::new(5, 1).unwrap();
        for i in 0..50 {
            let x = -1.0 + 2.0 * (i as f64) / 49.0;
            assert_abs_diff_eq!(k.eval_1d(x), k.eval_1d(-x), epsilon = 1e-13);
        }
    }

    #[test]
    fn kernel_1d_agrees_with_basis_sum() {
        let k = KernelSpec::new(7, 1).unwrap();
        for i in 0..21 {
            let x = -1.0 + 0.1 * i as f64;
            let direct: f64 = (0..=7)
                .map(|m| legendre_phi(m, 0.0) * legendre_phi(m, x))
                .sum();
            assert_abs_diff_eq!(k.eval_1d(x), direct, epsilon = 1e-13);
        }
    }

    #[test]
    fn product_kernel_examples() {
        let k32 = KernelSpec::new(3, 2).unwrap();
        assert_eq!(k32.eval_product(&[2.0, 0.0]).unwrap(), 0.0);
        let k13 = KernelSpec::new(1, 3).unwrap();
        assert_abs_diff_eq!(
            k13.eval_product(&[0.0, 0.0, 0.0]).unwrap(),
            0.125,
            epsilon = 1e-15
        );
        let k31 = KernelSpec::new(3, 1).unwrap();
        for &x in &[-0.7, 0.0, 0.3, 2.0] {
            assert_eq!(k31.eval_product(&[x]).unwrap(), k31.eval_1d(x));
        }
        assert!(k32.eval_product(&[0.0]).is_err());
    }

    #[test]
    fn moments_vanish_up_to_order() {
        for beta in [1u32, 3, 5, 7] {
            let k = KernelSpec::new(beta, 1).unwrap();
            let pts = k.default_quadrature_points() + 4;
            assert_abs_diff_eq!(k.moment(0, pts), 1.0, epsilon = 1e-8);
            for s in 1..=beta {
                assert_abs_diff_eq!(k.moment(s, pts), 0.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn moment_examples() {
        let k3 = KernelSpec::new(3, 1).unwrap();
        assert_abs_diff_eq!(k3.moment(0, 8), 1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(k3.moment(2, 8), 0.0, epsilon = 1e-8);
        let k1 = KernelSpec::new(1, 1).unwrap();
        assert_abs_diff_eq!(k1.moment(1, 8), 0.0, epsilon = 1e-8);
    }

    #[test]
    fn product_annihilates_mixed_monomials_beta3() {
        // 2-D tensor quadrature: integral of y1^s1 y2^s2 K(y1) K(y2) factorizes,
        // so it vanishes whenever either exponent is in 1..=beta.
        let k = KernelSpec::new(3, 2).unwrap();
        let rule = GaussLegendre::new(10);
        for s1 in 0..=3u32 {
            for s2 in 0..=3u32 {
                if s1 == 0 && s2 == 0 {
                    continue;
                }
                let v = rule.integrate(|y1| {
                    rule.integrate(|y2| {
                        y1.powi(s1 as i32) * y2.powi(s2 as i32) * k.eval_product(&[y1, y2]).unwrap()
                    })
                });
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-8);
            }
        }
    }
}
