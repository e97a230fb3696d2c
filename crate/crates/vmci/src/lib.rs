//! Nonparametric conditional independence testing and causal discovery.
//!
//! The pipeline, bottom up:
//!
//! - [`kernels`]: Legendre kernels of prescribed odd order and their
//!   product extensions. Higher-order kernels trade positivity for
//!   vanishing moments.
//! - [`density`]: multivariate KDE over the fit half of a sample, with the
//!   bandwidth schedule h = gamma * n^(-1/(2 beta + d)).
//! - [`estimators`]: the Von Mises entropy estimator (sample splitting,
//!   Monte Carlo average of -log p_h over the held-out half) and the
//!   four-term conditional-mutual-information estimator built from it.
//! - [`citest`]: the VM-CI test (dependence iff the CMI estimate exceeds
//!   i_min / 2) and a Gaussian partial-correlation baseline behind one
//!   tester interface.
//! - [`graph`]: DAGs, partially directed graphs, d-separation, Meek rules,
//!   essential graphs, structural loss, and the perfect CI oracle.
//! - [`discovery`]: the PC and grow-shrink structure-learning algorithms
//!   over any tester.
//! - [`synth`]: seeded power-law mixture and structural-equation-model
//!   generators for the experiment suite.
//! - [`experiment`]: declarative sweeps (error vs n, loss vs n, entropy
//!   convergence) with reproducible seeds and CSV output.

pub mod citest;
pub mod density;
pub mod discovery;
pub mod error;
pub mod estimators;
pub mod experiment;
pub mod graph;
pub mod kernels;
pub mod quadrature;
pub mod samples;
pub mod seed;
pub mod synth;

pub use citest::{
    gaussian_pc_test, vm_ci_test, CiDecision, CiTester, CiTesterConfig, GaussianPcTester,
    VmCiTester,
};
pub use density::{compute_bandwidth, fit_kde, BandwidthRule, DensityEstimate};
pub use discovery::{gs, gs_markov_boundary, pc, pc_test_count_bound, DiscoveryResult, SepsetMap};
pub use error::{Error, Result};
pub use estimators::{
    cmi_vm, cmi_vm_with_exponents, entropy_plugin_oracle, entropy_vm, split_indices, CmiEstimate,
    EntropyEstimate, ExponentRule,
};
pub use graph::{meek_closure, structural_loss, Dag, OracleCiTester, Pdag};
pub use kernels::{legendre_phi, KernelSpec};
pub use samples::SampleMatrix;
pub use synth::{
    power_law_entropy, power_law_mean, power_law_transform, sample_mixture, sample_power_law,
    sample_sem, sem_from_noise, MixtureSpec, SemSpec,
};
