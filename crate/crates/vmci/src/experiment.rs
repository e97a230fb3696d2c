//! Experiment orchestration: declarative configs, seeded replication
//! sweeps over sample sizes, and CSV result rows reproducing the error-vs-n
//! and loss-vs-n curves.
//!
//! Replications run on a worker pool; rows are emitted in deterministic
//! (n, replication) order regardless of completion order, and every row's
//! seed is derivable from (root_seed, n, replication) via
//! [`crate::seed::derive_row_seed`]. With timing capture disabled (the
//! default) two runs of the same config produce byte-identical CSV.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::citest::{gaussian_pc_test, vm_ci_test, CiTesterConfig, GaussianPcTester, VmCiTester};
use crate::discovery::{gs, pc, pc_test_count_bound};
use crate::error::{Error, Result};
use crate::estimators::entropy_vm;
use crate::graph::{structural_loss, OracleCiTester};
use crate::seed::derive_row_seed;
use crate::synth::{
    power_law_entropy, sample_mixture, sample_power_law, sample_sem, MixtureSpec, SemSpec,
};

/// Which curve to reproduce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExperimentKind {
    /// Type I + type II error of the CI test on the mixture's null and
    /// alternative parameterizations, per sample size.
    CiErrorCurve,
    /// Structural loss of PC or GS against the known SEM graph.
    DiscoveryLossCurve,
    /// Absolute error of the entropy estimator on the d = 1 power-law
    /// model against its closed form.
    EntropyConvergence,
}

impl ExperimentKind {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "ci_error_curve" => Ok(Self::CiErrorCurve),
            "discovery_loss_curve" => Ok(Self::DiscoveryLossCurve),
            "entropy_convergence" => Ok(Self::EntropyConvergence),
            other => Err(Error::Config(format!("unknown experiment `{other}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::CiErrorCurve => "ci_error_curve",
            Self::DiscoveryLossCurve => "discovery_loss_curve",
            Self::EntropyConvergence => "entropy_convergence",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TesterChoice {
    VmCi,
    Gauss,
    Oracle,
}

impl TesterChoice {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "vmci" => Ok(Self::VmCi),
            "gauss" => Ok(Self::Gauss),
            "oracle" => Ok(Self::Oracle),
            other => Err(Error::Config(format!("unknown tester `{other}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::VmCi => "vmci",
            Self::Gauss => "gauss",
            Self::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Pc,
    Gs,
}

impl Algorithm {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "pc" => Ok(Self::Pc),
            "gs" => Ok(Self::Gs),
            other => Err(Error::Config(format!("unknown algorithm `{other}`"))),
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Pc => "pc",
            Self::Gs => "gs",
        }
    }
}

/// Declarative description of a sweep. Built from a flat key = value file
/// (or flags); see the [`std::str::FromStr`] impl below for the keys.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub sample_sizes: Vec<usize>,
    pub replications: usize,
    pub tester: TesterChoice,
    pub i_min: f64,
    pub beta: u32,
    pub gamma: f64,
    pub floor: f64,
    pub alpha: f64,
    pub algorithm: Algorithm,
    /// Maximum PC level; the variable count minus 2 when unset.
    pub delta_max: Option<usize>,
    pub root_seed: u64,
    pub out: String,
    /// Record wall times in the output. Off by default so that identical
    /// configs produce byte-identical CSV.
    pub record_timing: bool,
}

impl ExperimentConfig {
    /// Defaults for one experiment kind: estimator parameters from the
    /// standalone-test setup, discovery threshold lowered to 0.01.
    pub fn defaults(kind: ExperimentKind) -> Self {
        Self {
            experiment: kind,
            sample_sizes: vec![500, 1000, 2000],
            replications: match kind {
                ExperimentKind::CiErrorCurve => 100,
                ExperimentKind::DiscoveryLossCurve => 25,
                ExperimentKind::EntropyConvergence => 20,
            },
            tester: TesterChoice::VmCi,
            i_min: match kind {
                ExperimentKind::DiscoveryLossCurve => 0.01,
                _ => 0.11,
            },
            beta: 3,
            gamma: 0.35,
            floor: 1e-6,
            alpha: 0.05,
            algorithm: Algorithm::Pc,
            delta_max: None,
            root_seed: 0,
            out: "results.csv".to_string(),
            record_timing: false,
        }
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        std::fs::read_to_string(path)?.parse()
    }

    /// Apply one key = value assignment; used by both the file parser and
    /// CLI flag overrides (flags win by being applied later).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("invalid {what}: `{value}`"));
        match key {
            "experiment" => self.experiment = ExperimentKind::parse(value)?,
            "sample_sizes" => {
                self.sample_sizes = value
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad("sample size")))
                    .collect::<Result<_>>()?;
            }
            "replications" => self.replications = value.parse().map_err(|_| bad("replications"))?,
            "tester" => self.tester = TesterChoice::parse(value)?,
            "i_min" => self.i_min = value.parse().map_err(|_| bad("i_min"))?,
            "beta" => self.beta = value.parse().map_err(|_| bad("beta"))?,
            "gamma" => self.gamma = value.parse().map_err(|_| bad("gamma"))?,
            "floor" => self.floor = value.parse().map_err(|_| bad("floor"))?,
            "alpha" => self.alpha = value.parse().map_err(|_| bad("alpha"))?,
            "algorithm" => self.algorithm = Algorithm::parse(value)?,
            "delta_max" => self.delta_max = Some(value.parse().map_err(|_| bad("delta_max"))?),
            "root_seed" => self.root_seed = value.parse().map_err(|_| bad("root_seed"))?,
            "out" => self.out = value.to_string(),
            "record_timing" => {
                self.record_timing = value.parse().map_err(|_| bad("record_timing"))?
            }
            other => return Err(Error::Config(format!("unknown key `{other}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Config("sample_sizes must be non-empty".into()));
        }
        if !self.sample_sizes.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(
                "sample_sizes must be strictly increasing".into(),
            ));
        }
        if self.beta == 0 || self.beta.is_multiple_of(2) {
            return Err(Error::Config(format!(
                "beta must be a positive odd integer, got {}",
                self.beta
            )));
        }
        if self.i_min.is_nan() || self.i_min <= 0.0 {
            return Err(Error::Config("i_min must be positive".into()));
        }
        if self.gamma.is_nan() || self.gamma <= 0.0 {
            return Err(Error::Config("gamma must be positive".into()));
        }
        if self.floor.is_nan() || self.floor <= 0.0 {
            return Err(Error::Config("floor must be positive".into()));
        }
        if self.alpha.is_nan() || self.alpha <= 0.0 || self.alpha >= 1.0 {
            return Err(Error::Config("alpha must lie in (0, 1)".into()));
        }
        Ok(())
    }

    fn tester_config(&self, base_seed: u64) -> CiTesterConfig {
        CiTesterConfig {
            i_min: self.i_min,
            beta: self.beta,
            gamma: self.gamma,
            floor: self.floor,
            alpha: self.alpha,
            base_seed,
            ..CiTesterConfig::default()
        }
    }
}

/// Parse the flat key = value config format. `#` starts a comment; keys
/// are experiment, sample_sizes, replications, tester, i_min, beta, gamma,
/// floor, alpha, algorithm, delta_max, root_seed, out, record_timing. The
/// experiment key is required (it selects the defaults the remaining keys
/// override).
impl std::str::FromStr for ExperimentConfig {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut pairs = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            pairs.push((key.trim().to_string(), value.trim().to_string()));
        }
        let kind_str = pairs
            .iter()
            .find(|(k, _)| k == "experiment")
            .map(|(_, v)| v.clone())
            .ok_or_else(|| Error::Config("missing `experiment` key".into()))?;
        let mut config = Self::defaults(ExperimentKind::parse(&kind_str)?);
        for (key, value) in pairs {
            config.set(&key, &value)?;
        }
        config.validate()?;
        Ok(config)
    }
}

/// One output record. Summary rows aggregate a sample size and carry
/// replication -1.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub n: usize,
    pub replication: i64,
    pub metric_name: String,
    pub metric_value: f64,
    pub wall_time_s: f64,
    pub seed: u64,
}

/// Write rows as CSV with the fixed header
/// `n,replication,metric_name,metric_value,wall_time_s,seed`.
pub fn write_rows_csv<W: Write>(rows: &[ResultRow], mut w: W) -> Result<()> {
    writeln!(w, "n,replication,metric_name,metric_value,wall_time_s,seed")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.n, r.replication, r.metric_name, r.metric_value, r.wall_time_s, r.seed
        )?;
    }
    Ok(())
}

/// Run the configured experiment and return its rows in deterministic
/// order. Dispatches on the experiment kind.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    match config.experiment {
        ExperimentKind::CiErrorCurve => run_ci_error_curve(config),
        ExperimentKind::DiscoveryLossCurve => run_discovery_loss_curve(config),
        ExperimentKind::EntropyConvergence => run_entropy_convergence(config),
    }
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(|a, b| a.total_cmp(b));
    let k = values.len();
    if k == 0 {
        return f64::NAN;
    }
    if k % 2 == 1 {
        values[k / 2]
    } else {
        0.5 * (values[k / 2 - 1] + values[k / 2])
    }
}

fn timed<T>(record: bool, f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    let elapsed = if record {
        start.elapsed().as_secs_f64()
    } else {
        0.0
    };
    (out, elapsed)
}

/// Per (n, replication): one CI test on mixture data, the first half of
/// replications on the null model, the rest on the alternative. Emits a
/// `test_error` row per test (1 = wrong verdict) and per-n summary rows
/// `error_sum` (type I rate + type II rate) and `mean_wall_time_s`.
pub fn run_ci_error_curve(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let n_null = config.replications.div_ceil(2);
    let tasks: Vec<(usize, usize)> = config
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..config.replications).map(move |r| (n, r)))
        .collect();

    let results: Vec<Result<ResultRow>> = tasks
        .par_iter()
        .map(|&(n, rep)| {
            let seed = derive_row_seed(config.root_seed, n, rep);
            let is_null = rep < n_null;
            let spec = if is_null {
                MixtureSpec::null_model()
            } else {
                MixtureSpec::alternative_model()
            };
            let data = sample_mixture(n, &spec, seed)?;
            let (verdict, wall) = timed(config.record_timing, || match config.tester {
                TesterChoice::Gauss => {
                    gaussian_pc_test(&data, "X", "Y", &["Z1", "Z2"], config.alpha)
                }
                _ => vm_ci_test(&data, "X", "Y", &["Z1", "Z2"], &config.tester_config(seed)),
            });
            let independent = verdict?.independent;
            let error = if is_null { !independent } else { independent };
            Ok(ResultRow {
                n,
                replication: rep as i64,
                metric_name: "test_error".to_string(),
                metric_value: f64::from(u8::from(error)),
                wall_time_s: wall,
                seed,
            })
        })
        .collect();

    let mut rows: Vec<ResultRow> = results.into_iter().collect::<Result<_>>()?;
    let mut summaries = Vec::new();
    for &n in &config.sample_sizes {
        let per_n: Vec<&ResultRow> = rows.iter().filter(|r| r.n == n).collect();
        let type_i_rate = per_n
            .iter()
            .filter(|r| (r.replication as usize) < n_null)
            .map(|r| r.metric_value)
            .sum::<f64>()
            / n_null as f64;
        let n_alt = config.replications - n_null;
        let type_ii_rate = if n_alt == 0 {
            0.0
        } else {
            per_n
                .iter()
                .filter(|r| (r.replication as usize) >= n_null)
                .map(|r| r.metric_value)
                .sum::<f64>()
                / n_alt as f64
        };
        let mean_wall = per_n.iter().map(|r| r.wall_time_s).sum::<f64>() / per_n.len() as f64;
        summaries.push(ResultRow {
            n,
            replication: -1,
            metric_name: "error_sum".to_string(),
            metric_value: type_i_rate + type_ii_rate,
            wall_time_s: mean_wall,
            seed: config.root_seed,
        });
    }
    rows.extend(summaries);
    sort_rows(&mut rows);
    Ok(rows)
}

/// Per (n, replication): SEM data, one discovery run, structural loss
/// against the essential graph of the true SEM structure. Emits
/// `structural_loss` and `ci_test_count` rows per replication and a per-n
/// `median_structural_loss` summary.
pub fn run_discovery_loss_curve(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let sem = SemSpec::new(config.beta)?;
    let truth_dag = sem.dag();
    let truth = truth_dag.essential_graph();
    let vars = truth_dag.vertex_names().to_vec();
    let delta_max = config.delta_max.unwrap_or(vars.len().saturating_sub(2));
    let bound = pc_test_count_bound(vars.len(), delta_max);

    let tasks: Vec<(usize, usize)> = config
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..config.replications).map(move |r| (n, r)))
        .collect();

    let results: Vec<Result<Vec<ResultRow>>> = tasks
        .par_iter()
        .map(|&(n, rep)| {
            let seed = derive_row_seed(config.root_seed, n, rep);
            let data = sample_sem(n, &sem, seed)?;
            let (run, wall) = timed(config.record_timing, || match config.tester {
                TesterChoice::VmCi => {
                    let tester = VmCiTester::new(&data, config.tester_config(seed));
                    run_algorithm(config.algorithm, &tester, &vars, delta_max)
                }
                TesterChoice::Gauss => {
                    let tester = GaussianPcTester::new(&data, config.alpha);
                    run_algorithm(config.algorithm, &tester, &vars, delta_max)
                }
                TesterChoice::Oracle => {
                    let tester = OracleCiTester::new(&truth_dag);
                    run_algorithm(config.algorithm, &tester, &vars, delta_max)
                }
            });
            let run = run?;
            if config.algorithm == Algorithm::Pc && run.ci_test_count as u128 > bound {
                return Err(Error::Config(format!(
                    "pc made {} tests, above the structural bound {bound}",
                    run.ci_test_count
                )));
            }
            let loss = structural_loss(&run.graph, &truth)?;
            Ok(vec![
                ResultRow {
                    n,
                    replication: rep as i64,
                    metric_name: "structural_loss".to_string(),
                    metric_value: loss as f64,
                    wall_time_s: wall,
                    seed,
                },
                ResultRow {
                    n,
                    replication: rep as i64,
                    metric_name: "ci_test_count".to_string(),
                    metric_value: run.ci_test_count as f64,
                    wall_time_s: wall,
                    seed,
                },
            ])
        })
        .collect();

    let mut rows = Vec::new();
    for r in results {
        rows.extend(r?);
    }
    let mut summaries = Vec::new();
    for &n in &config.sample_sizes {
        let mut losses: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n && r.metric_name == "structural_loss")
            .map(|r| r.metric_value)
            .collect();
        summaries.push(ResultRow {
            n,
            replication: -1,
            metric_name: "median_structural_loss".to_string(),
            metric_value: median(&mut losses),
            wall_time_s: 0.0,
            seed: config.root_seed,
        });
    }
    rows.extend(summaries);
    sort_rows(&mut rows);
    Ok(rows)
}

fn run_algorithm(
    algorithm: Algorithm,
    tester: &dyn crate::citest::CiTester,
    vars: &[String],
    delta_max: usize,
) -> Result<crate::discovery::DiscoveryResult> {
    match algorithm {
        Algorithm::Pc => pc(tester, vars, delta_max),
        Algorithm::Gs => gs(tester, vars),
    }
}

/// Per (n, replication): n power-law observations, one entropy estimate,
/// absolute error against the closed form. Emits `entropy_abs_error` rows
/// and a per-n `median_entropy_abs_error` summary.
pub fn run_entropy_convergence(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let target = power_law_entropy(config.beta);
    let tasks: Vec<(usize, usize)> = config
        .sample_sizes
        .iter()
        .flat_map(|&n| (0..config.replications).map(move |r| (n, r)))
        .collect();

    let results: Vec<Result<ResultRow>> = tasks
        .par_iter()
        .map(|&(n, rep)| {
            let seed = derive_row_seed(config.root_seed, n, rep);
            let data = sample_power_law(n, config.beta, seed)?;
            let (est, wall) = timed(config.record_timing, || {
                entropy_vm(&data, config.beta, config.gamma, 1, config.floor, seed)
            });
            let est = est?;
            Ok(ResultRow {
                n,
                replication: rep as i64,
                metric_name: "entropy_abs_error".to_string(),
                metric_value: (est.value - target).abs(),
                wall_time_s: wall,
                seed,
            })
        })
        .collect();

    let mut rows: Vec<ResultRow> = results.into_iter().collect::<Result<_>>()?;
    let mut summaries = Vec::new();
    for &n in &config.sample_sizes {
        let mut errs: Vec<f64> = rows
            .iter()
            .filter(|r| r.n == n)
            .map(|r| r.metric_value)
            .collect();
        summaries.push(ResultRow {
            n,
            replication: -1,
            metric_name: "median_entropy_abs_error".to_string(),
            metric_value: median(&mut errs),
            wall_time_s: 0.0,
            seed: config.root_seed,
        });
    }
    rows.extend(summaries);
    sort_rows(&mut rows);
    Ok(rows)
}

/// Deterministic output order: by n, then replication with summaries (-1)
/// last within each n, then metric name.
fn sort_rows(rows: &mut [ResultRow]) {
    rows.sort_by(|a, b| {
        let ra = if a.replication < 0 {
            i64::MAX
        } else {
            a.replication
        };
        let rb = if b.replication < 0 {
            i64::MAX
        } else {
            b.replication
        };
        (a.n, ra, &a.metric_name).cmp(&(b.n, rb, &b.metric_name))
    });
}
