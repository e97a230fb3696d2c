//! Synthetic data generators: the power-law conditional-independence
//! mixture over (X, Y, Z1, Z2) and the fixed six-variable structural
//! equation model, both seeded and reproducible.
//!
//! All uniform draws come from ChaCha8 with one root seed; row i reads its
//! own stream (`set_stream(i)`), and each row consumes a fixed number of
//! draws in a fixed order, so generation is bit-identical whether rows are
//! produced sequentially or in parallel.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::Dag;
use crate::samples::SampleMatrix;

/// Mixture over (X, Y, Z1, Z2): X copies the latent uniform of Z1 with
/// probability t1, of Z2 with probability t2, and is fresh otherwise; Y
/// additionally copies X's uniform with probability t_xy. Setting t_xy = 0
/// makes X and Y conditionally independent given (Z1, Z2) by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureSpec {
    pub beta: u32,
    pub t1: f64,
    pub t2: f64,
    pub t_xy: f64,
}

impl MixtureSpec {
    pub fn new(beta: u32, t1: f64, t2: f64, t_xy: f64) -> Result<Self> {
        if beta == 0 {
            return Err(Error::InvalidParameter(
                "mixture beta must be a positive integer".into(),
            ));
        }
        for (name, v) in [("t1", t1), ("t2", t2), ("t_xy", t_xy)] {
            if v.is_nan() || v < 0.0 || v.is_infinite() {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        if t1 + t2 + t_xy >= 1.0 {
            return Err(Error::InvalidParameter(format!(
                "need t1 + t2 + t_xy < 1, got {}",
                t1 + t2 + t_xy
            )));
        }
        Ok(Self { beta, t1, t2, t_xy })
    }

    /// The conditionally independent parameterization used for null-model
    /// experiments: beta 3, (t1, t2, t_xy) = (0.2, 0.2, 0).
    pub fn null_model() -> Self {
        Self::new(3, 0.2, 0.2, 0.0).unwrap()
    }

    /// The dependent parameterization used for alternative-model
    /// experiments: beta 3, (t1, t2, t_xy) = (0.2, 0.1, 0.3); its
    /// conditional dependence level is 0.11.
    pub fn alternative_model() -> Self {
        Self::new(3, 0.2, 0.1, 0.3).unwrap()
    }
}

/// The six-equation structural model over X1..X6 with power-law noise of
/// smoothness `beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SemSpec {
    pub beta: u32,
}

impl SemSpec {
    pub fn new(beta: u32) -> Result<Self> {
        if beta == 0 {
            return Err(Error::InvalidParameter(
                "sem beta must be a positive integer".into(),
            ));
        }
        Ok(Self { beta })
    }

    /// The causal graph implied by the equations:
    /// X1 -> X3 <- X2, X1 -> X5 <- X4, X4 -> X6 <- X5.
    pub fn dag(&self) -> Dag {
        Dag::from_edges(
            &["X1", "X2", "X3", "X4", "X5", "X6"],
            &[
                ("X1", "X3"),
                ("X2", "X3"),
                ("X1", "X5"),
                ("X4", "X5"),
                ("X4", "X6"),
                ("X5", "X6"),
            ],
        )
        .expect("the fixed SEM graph is a valid DAG")
    }
}

/// Inverse-CDF transform u^(1/(beta + 1.15)) mapping U\[0,1\] to the
/// power-law density (beta + 1.15) x^(beta + 0.15) on [0, 1].
pub fn power_law_transform(u: f64, beta: u32) -> Result<f64> {
    if !(0.0..=1.0).contains(&u) {
        return Err(Error::InvalidParameter(format!(
            "power-law transform input must lie in [0, 1], got {u}"
        )));
    }
    Ok(u.powf(1.0 / (f64::from(beta) + 1.15)))
}

/// Closed-form differential entropy of the power-law density, in nats:
/// H = -ln a + (a - 1)/a with a = beta + 1.15.
pub fn power_law_entropy(beta: u32) -> f64 {
    let a = f64::from(beta) + 1.15;
    -a.ln() + (a - 1.0) / a
}

/// Mean of the power-law density: a / (a + 1).
pub fn power_law_mean(beta: u32) -> f64 {
    let a = f64::from(beta) + 1.15;
    a / (a + 1.0)
}

fn row_rng(seed: u64, row: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(row as u64);
    rng
}

/// Draw n rows of the mixture. Per row, six uniforms are consumed in the
/// fixed order (u_z1, u_z2, choice_x, fresh_x, choice_y, fresh_y); the
/// choice draws are partitioned by cumulative weights in the order
/// (t1, t2, t_xy, remainder).
pub fn sample_mixture(n: usize, spec: &MixtureSpec, seed: u64) -> Result<SampleMatrix> {
    MixtureSpec::new(spec.beta, spec.t1, spec.t2, spec.t_xy)?;
    if n == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut data = Vec::with_capacity(n * 4);
    for row in 0..n {
        let mut rng = row_rng(seed, row);
        let u_z1: f64 = rng.gen();
        let u_z2: f64 = rng.gen();
        let choice_x: f64 = rng.gen();
        let fresh_x: f64 = rng.gen();
        let choice_y: f64 = rng.gen();
        let fresh_y: f64 = rng.gen();

        let u_x = if choice_x < spec.t1 {
            u_z1
        } else if choice_x < spec.t1 + spec.t2 {
            u_z2
        } else {
            fresh_x
        };
        let u_y = if choice_y < spec.t1 {
            u_z1
        } else if choice_y < spec.t1 + spec.t2 {
            u_z2
        } else if choice_y < spec.t1 + spec.t2 + spec.t_xy {
            u_x
        } else {
            fresh_y
        };

        for u in [u_x, u_y, u_z1, u_z2] {
            data.push(power_law_transform(u, spec.beta)?);
        }
    }
    SampleMatrix::new(vec!["X".into(), "Y".into(), "Z1".into(), "Z2".into()], data)
}

/// Evaluate the six structural equations on one noise vector.
pub fn sem_from_noise(u: &[f64; 6]) -> [f64; 6] {
    let x1 = u[0];
    let x2 = u[1];
    let x3 = x1 * x1 + x2 + u[2];
    let x4 = u[3];
    let x5 = 0.5 * x1 * x1 - 0.5 * x4 * x4 + u[4];
    let x6 = x4 * x4 * x4 - x5 + u[5];
    [x1, x2, x3, x4, x5, x6]
}

/// Draw n rows of the structural model; per row, six uniforms transformed
/// to power-law noise, then pushed through the equations. Values are not
/// rescaled to [0, 1] (X3 can reach 3).
pub fn sample_sem(n: usize, spec: &SemSpec, seed: u64) -> Result<SampleMatrix> {
    SemSpec::new(spec.beta)?;
    if n == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut data = Vec::with_capacity(n * 6);
    for row in 0..n {
        let mut rng = row_rng(seed, row);
        let mut noise = [0.0; 6];
        for slot in &mut noise {
            *slot = power_law_transform(rng.gen(), spec.beta)?;
        }
        data.extend_from_slice(&sem_from_noise(&noise));
    }
    SampleMatrix::new((1..=6).map(|i| format!("X{i}")).collect(), data)
}

/// Draw n observations of a single power-law column named `X`; the d = 1
/// model for entropy-convergence experiments.
pub fn sample_power_law(n: usize, beta: u32, seed: u64) -> Result<SampleMatrix> {
    if n == 0 {
        return Err(Error::TooFewSamples { needed: 1, got: 0 });
    }
    let mut data = Vec::with_capacity(n);
    for row in 0..n {
        let mut rng = row_rng(seed, row);
        data.push(power_law_transform(rng.gen(), beta)?);
    }
    SampleMatrix::new(vec!["X".into()], data)
}
