//! Monte Carlo properties of the estimators and generators at desk scale.

mod support;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::{ks_critical, ks_one_sample, ks_two_sample};
use vmci::density::{fit_kde, BandwidthRule};
use vmci::estimators::{cmi_vm, entropy_plugin_oracle, entropy_vm};
use vmci::kernels::KernelSpec;
use vmci::samples::SampleMatrix;
use vmci::synth::{power_law_mean, sample_mixture, sample_power_law, MixtureSpec};
use vmci::{gaussian_pc_test, power_law_entropy};

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(|a, b| a.total_cmp(b));
    let k = v.len();
    if k % 2 == 1 {
        v[k / 2]
    } else {
        0.5 * (v[k / 2 - 1] + v[k / 2])
    }
}

/// Integrated squared error of a fitted KDE against the closed-form
/// power-law density on an interior grid, medianed over seeds, shrinks
/// with the sample size.
#[test]
fn kde_interior_ise_decreases_with_n() {
    let a = 4.15;
    let truth = |x: f64| a * x.powf(a - 1.0);
    let ise = |n: usize, seed: u64| -> f64 {
        let data = sample_power_law(n, 3, seed).unwrap();
        let kernel = KernelSpec::new(3, 1).unwrap();
        let rule = BandwidthRule::new(0.35, 3, 1).unwrap();
        // fit on the first half, mirroring the estimator's split sizes
        let rows: Vec<usize> = (0..n.div_ceil(2)).collect();
        let est = fit_kde(data.select_rows(&rows), kernel, &rule, n, 1e-6).unwrap();
        let mut total = 0.0;
        let grid = 200;
        for i in 0..grid {
            let x = 0.1 + 0.8 * (i as f64 + 0.5) / grid as f64;
            let err = est.eval_raw(&[x]).unwrap() - truth(x);
            total += err * err / grid as f64;
        }
        total
    };
    let coarse: Vec<f64> = (0..20).map(|s| ise(250, 900 + s)).collect();
    let fine: Vec<f64> = (0..20).map(|s| ise(4000, 900 + s)).collect();
    let (m_coarse, m_fine) = (median(coarse), median(fine));
    assert!(
        m_fine < m_coarse,
        "ISE medians: n=4000 gives {m_fine}, n=250 gives {m_coarse}"
    );
}

/// The Monte Carlo estimator and the plug-in quadrature of the same fitted
/// density agree to 0.05 in the median.
#[test]
fn entropy_vm_agrees_with_plugin_oracle() {
    let n = 4000;
    let floor = 1e-6;
    let mut diffs = Vec::new();
    for seed in 0..20u64 {
        let data = sample_power_law(n, 3, 700 + seed).unwrap();
        let vm = entropy_vm(&data, 3, 0.35, 1, floor, seed).unwrap();
        let (fit_rows, _) = vmci::estimators::split_indices(n, seed);
        let kernel = KernelSpec::new(3, 1).unwrap();
        let rule = BandwidthRule::new(0.35, 3, 1).unwrap();
        let est = fit_kde(data.select_rows(&fit_rows), kernel, &rule, n, floor).unwrap();
        let h = est.bandwidth();
        let plugin =
            entropy_plugin_oracle(|p| est.eval(p).unwrap(), &[(-h, 1.0 + h)], 2000, floor).unwrap();
        diffs.push((vm.value - plugin).abs());
    }
    let m = median(diffs);
    assert!(m < 0.05, "median |vm - plugin| = {m}");
}

/// Three-term degenerate estimator on independent uniforms is near zero.
#[test]
fn mi_of_independent_uniforms_is_small() {
    let n = 4000;
    let mut values = Vec::new();
    for seed in 0..20u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(3000 + seed);
        let data: Vec<f64> = (0..2 * n).map(|_| rng.gen::<f64>()).collect();
        let m = SampleMatrix::new(vec!["x".into(), "y".into()], data).unwrap();
        let est = cmi_vm(&m, "x", "y", &[], 3, 0.35, 1e-6, seed).unwrap();
        values.push(est.value.abs());
    }
    let med = median(values);
    assert!(med < 0.05, "median |MI| = {med}");
}

/// Level of the Gaussian baseline under a true Gaussian null.
#[test]
fn gaussian_baseline_holds_its_level() {
    let n = 5000;
    let mut independent_calls = 0;
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(500 + seed);
        let mut normal = move || -> f64 {
            let u1: f64 = rng.gen::<f64>().max(1e-12);
            let u2: f64 = rng.gen();
            (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
        };
        let mut data = Vec::with_capacity(2 * n);
        for _ in 0..n {
            data.push(normal());
            data.push(normal());
        }
        let m = SampleMatrix::new(vec!["x".into(), "y".into()], data).unwrap();
        if gaussian_pc_test(&m, "x", "y", &[], 0.05)
            .unwrap()
            .independent
        {
            independent_calls += 1;
        }
    }
    assert!(
        independent_calls >= 90,
        "only {independent_calls}/100 independent verdicts under the null"
    );
}

/// Mixture marginals follow the power-law CDF x^(beta + 1.15).
#[test]
fn mixture_marginals_pass_ks() {
    let n = 10_000;
    let spec = MixtureSpec::null_model();
    let data = sample_mixture(n, &spec, 77).unwrap();
    let crit = ks_critical(0.01, n as f64);
    for col in 0..4 {
        let mut values = data.column(col);
        let d = ks_one_sample(&mut values, |x| x.clamp(0.0, 1.0).powf(4.15));
        assert!(
            d < crit,
            "column {col}: KS statistic {d} above critical {crit}"
        );
    }
}

/// With t1 = t2 the generator is distributionally symmetric under swapping
/// Z1 and Z2.
#[test]
fn mixture_symmetric_under_latent_swap() {
    let n = 10_000;
    let spec = MixtureSpec::new(3, 0.15, 0.15, 0.2).unwrap();
    let a = sample_mixture(n, &spec, 101).unwrap();
    let b = sample_mixture(n, &spec, 202).unwrap();
    let swapped = b.select(&[0, 1, 3, 2]); // X, Y, Z2, Z1
    let crit = ks_critical(0.01, (n * n) as f64 / (2 * n) as f64);
    for col in 0..4 {
        let mut va = a.column(col);
        let mut vb = swapped.column(col);
        let d = ks_two_sample(&mut va, &mut vb);
        assert!(
            d < crit,
            "column {col}: two-sample KS {d} above critical {crit}"
        );
    }
}

/// Empirical mean of a power-law column matches a/(a+1).
#[test]
fn power_law_mean_matches_theory() {
    let data = sample_power_law(10_000, 3, 31).unwrap();
    let mean: f64 = data.column(0).iter().sum::<f64>() / data.n_rows() as f64;
    assert!((mean - power_law_mean(3)).abs() < 0.01);
    assert!((power_law_mean(3) - 0.8058252427184466).abs() < 1e-12);
}

/// Convergence of the entropy estimator on the power-law target.
#[test]
fn entropy_error_shrinks_with_n() {
    let target = power_law_entropy(3);
    let mut coarse = Vec::new();
    let mut fine = Vec::new();
    for seed in 0..20u64 {
        let small = sample_power_law(250, 3, 4000 + seed).unwrap();
        let large = sample_power_law(4000, 3, 4000 + seed).unwrap();
        coarse.push((entropy_vm(&small, 3, 0.35, 1, 1e-6, seed).unwrap().value - target).abs());
        fine.push((entropy_vm(&large, 3, 0.35, 1, 1e-6, seed).unwrap().value - target).abs());
    }
    let (m_coarse, m_fine) = (median(coarse), median(fine));
    assert!(
        m_fine < m_coarse,
        "median |error|: n=4000 gives {m_fine}, n=250 gives {m_coarse}"
    );
}

/// Wall time of one CMI evaluation roughly quadruples per doubling of n.
#[test]
fn cmi_cost_scales_quadratically_per_doubling() {
    use std::time::Instant;
    let spec = MixtureSpec::null_model();
    let time_at = |n: usize| -> f64 {
        let data = sample_mixture(n, &spec, 5_000 + n as u64).unwrap();
        let mut times: Vec<f64> = (0..5u64)
            .map(|s| {
                let t0 = Instant::now();
                cmi_vm(&data, "X", "Y", &["Z1", "Z2"], 3, 0.35, 1e-6, s).unwrap();
                t0.elapsed().as_secs_f64()
            })
            .collect();
        times.sort_by(|a, b| a.total_cmp(b));
        times[2]
    };
    let t1 = time_at(1000);
    let t2 = time_at(2000);
    let t4 = time_at(4000);
    for (label, ratio) in [("2000/1000", t2 / t1), ("4000/2000", t4 / t2)] {
        assert!(
            (2.5..=8.0).contains(&ratio),
            "doubling ratio {label} = {ratio:.2} outside [2.5, 8] (times {t1:.4} {t2:.4} {t4:.4})"
        );
    }
}
