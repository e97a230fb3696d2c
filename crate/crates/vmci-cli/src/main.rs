//! Command-line front end: synthetic data generation, entropy and CMI
//! estimation, CI testing, causal discovery, and experiment sweeps.
//!
//! Exit codes: 0 success (for `ci-test`: independent), 2 usage error,
//! 3 dependent (`ci-test` only), 64 runtime error.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use vmci::citest::{CiTesterConfig, GaussianPcTester, VmCiTester};
use vmci::discovery::{gs, pc, DiscoveryResult};
use vmci::error::Result;
use vmci::experiment::{run_experiment, write_rows_csv, ExperimentConfig};
use vmci::graph::{structural_loss, Dag, OracleCiTester};
use vmci::samples::SampleMatrix;
use vmci::synth::{sample_mixture, sample_sem, MixtureSpec, SemSpec};
use vmci::Error;

const EXIT_DEPENDENT: u8 = 3;
const EXIT_RUNTIME: u8 = 64;

#[derive(Parser)]
#[command(
    name = "vmci",
    about = "Von Mises CMI estimation, conditional independence testing, and causal discovery",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate synthetic data as CSV.
    Simulate(SimulateArgs),
    /// Estimate the joint entropy of all columns of a CSV file.
    Entropy(EntropyArgs),
    /// Estimate conditional mutual information I(X;Y|Z).
    Cmi(CmiArgs),
    /// Run one conditional independence test. Exit code 0 = independent,
    /// 3 = dependent.
    CiTest(CiTestArgs),
    /// Run PC or GS structure learning and write the resulting graph.
    Discover(DiscoverArgs),
    /// Run a configured experiment sweep and write result rows as CSV.
    Experiment(ExperimentArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelChoice {
    Mixture,
    Sem,
}

#[derive(Args)]
struct SimulateArgs {
    /// Generative model.
    #[arg(long, value_enum)]
    model: ModelChoice,
    /// Number of observations.
    #[arg(long)]
    n: usize,
    /// Root seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Power-law smoothness parameter of the model.
    #[arg(long, default_value_t = 3)]
    beta: u32,
    /// Mixture weight on the first latent (mixture model only).
    #[arg(long, default_value_t = 0.2)]
    t1: f64,
    /// Mixture weight on the second latent (mixture model only).
    #[arg(long, default_value_t = 0.2)]
    t2: f64,
    /// Mixture weight coupling Y to X (mixture model only).
    #[arg(long, default_value_t = 0.0)]
    txy: f64,
}

#[derive(Args)]
struct EntropyArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Kernel order (positive odd integer).
    #[arg(long, default_value_t = 3)]
    beta: u32,
    /// Bandwidth prefactor.
    #[arg(long, default_value_t = 0.35)]
    gamma: f64,
    /// Split seed.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Density evaluation floor.
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    /// Dimension used in the bandwidth exponent; the data dimension when
    /// omitted.
    #[arg(long)]
    exponent_dim: Option<u32>,
}

#[derive(Args)]
struct CmiArgs {
    #[arg(long)]
    data: PathBuf,
    /// First tested column.
    #[arg(long)]
    x: String,
    /// Second tested column.
    #[arg(long)]
    y: String,
    /// Conditioning columns, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    z: Vec<String>,
    #[arg(long, default_value_t = 3)]
    beta: u32,
    #[arg(long, default_value_t = 0.35)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum TesterArg {
    Vmci,
    Gauss,
    Oracle,
}

#[derive(Args)]
struct CiTestArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    x: String,
    #[arg(long)]
    y: String,
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    z: Vec<String>,
    /// Which tester to run.
    #[arg(long, value_enum, default_value_t = TesterArg::Vmci)]
    tester: TesterArg,
    /// Minimum dependence level; the VM-CI threshold is imin / 2.
    #[arg(long, default_value_t = 0.11)]
    imin: f64,
    /// Significance level of the Gaussian baseline.
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    beta: u32,
    #[arg(long, default_value_t = 0.35)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Pc,
    Gs,
}

#[derive(Args)]
struct DiscoverArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgorithmArg::Pc)]
    algorithm: AlgorithmArg,
    #[arg(long, value_enum, default_value_t = TesterArg::Vmci)]
    tester: TesterArg,
    /// Ground-truth graph file; enables loss reporting and is required by
    /// the oracle tester.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Output graph file.
    #[arg(long)]
    out: PathBuf,
    /// Minimum dependence level inside discovery.
    #[arg(long, default_value_t = 0.01)]
    imin: f64,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 3)]
    beta: u32,
    #[arg(long, default_value_t = 0.35)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-6)]
    floor: f64,
    /// Maximum PC level; variable count minus 2 when omitted.
    #[arg(long)]
    delta_max: Option<usize>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Flat key = value config file.
    #[arg(long)]
    config: PathBuf,
    /// key=value overrides applied after the file; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output CSV path override.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Replications override.
    #[arg(long)]
    replications: Option<usize>,
    /// Root seed override.
    #[arg(long)]
    root_seed: Option<u64>,
    /// Sample sizes override, comma separated.
    #[arg(long)]
    sample_sizes: Option<String>,
}

fn main() -> ExitCode {
    env_logger::init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Entropy(args) => entropy(args),
        Command::Cmi(args) => cmi(args),
        Command::CiTest(args) => ci_test(args),
        Command::Discover(args) => discover(args),
        Command::Experiment(args) => experiment(args),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_RUNTIME)
        }
    }
}

fn simulate(args: SimulateArgs) -> Result<ExitCode> {
    let data = match args.model {
        ModelChoice::Mixture => {
            let spec = MixtureSpec::new(args.beta, args.t1, args.t2, args.txy)?;
            sample_mixture(args.n, &spec, args.seed)?
        }
        ModelChoice::Sem => sample_sem(args.n, &SemSpec::new(args.beta)?, args.seed)?,
    };
    data.write_csv_path(&args.out)?;
    println!(
        "wrote {} rows x {} cols to {}",
        data.n_rows(),
        data.n_cols(),
        args.out.display()
    );
    Ok(ExitCode::SUCCESS)
}

fn entropy(args: EntropyArgs) -> Result<ExitCode> {
    let data = SampleMatrix::read_csv_path(&args.data)?;
    let exponent_dim = args.exponent_dim.unwrap_or(data.n_cols() as u32);
    let est = vmci::estimators::entropy_vm(
        &data,
        args.beta,
        args.gamma,
        exponent_dim,
        args.floor,
        args.seed,
    )?;
    println!("value = {}", est.value);
    println!("n_total = {}", est.n_total);
    println!("n_fit = {}", est.n_fit);
    println!("n_eval = {}", est.n_eval);
    println!("bandwidth_h = {}", est.bandwidth_h);
    println!("beta = {}", est.beta);
    println!("floor_hits = {}", est.floor_hits);
    Ok(ExitCode::SUCCESS)
}

fn cmi(args: CmiArgs) -> Result<ExitCode> {
    let data = SampleMatrix::read_csv_path(&args.data)?;
    let z: Vec<&str> = args.z.iter().map(String::as_str).collect();
    let est = vmci::estimators::cmi_vm(
        &data, &args.x, &args.y, &z, args.beta, args.gamma, args.floor, args.seed,
    )?;
    println!("value = {}", est.value);
    println!("d_z = {}", est.d_z);
    println!("h_xz = {}", est.h_xz.value);
    println!("h_yz = {}", est.h_yz.value);
    println!("h_z = {}", est.h_z.as_ref().map_or(0.0, |t| t.value));
    println!("h_xyz = {}", est.h_xyz.value);
    let hits: usize = [&est.h_xz, &est.h_yz, &est.h_xyz]
        .iter()
        .map(|t| t.floor_hits)
        .sum::<usize>()
        + est.h_z.as_ref().map_or(0, |t| t.floor_hits);
    println!("floor_hits = {hits}");
    Ok(ExitCode::SUCCESS)
}

fn ci_test(args: CiTestArgs) -> Result<ExitCode> {
    let data = SampleMatrix::read_csv_path(&args.data)?;
    let z: Vec<&str> = args.z.iter().map(String::as_str).collect();
    let decision = match args.tester {
        TesterArg::Vmci => {
            let config = CiTesterConfig {
                i_min: args.imin,
                beta: args.beta,
                gamma: args.gamma,
                floor: args.floor,
                alpha: args.alpha,
                base_seed: args.seed,
                ..CiTesterConfig::default()
            };
            vmci::citest::vm_ci_test(&data, &args.x, &args.y, &z, &config)?
        }
        TesterArg::Gauss => {
            vmci::citest::gaussian_pc_test(&data, &args.x, &args.y, &z, args.alpha)?
        }
        TesterArg::Oracle => {
            return Err(Error::InvalidParameter(
                "the oracle tester needs a graph, not data; use `discover --tester oracle`".into(),
            ))
        }
    };
    println!("tester = {}", decision.tester_name);
    println!("statistic = {}", decision.statistic);
    println!("threshold = {}", decision.threshold);
    println!("n_used = {}", decision.n_used);
    println!(
        "independent = {}",
        if decision.independent {
            "true"
        } else {
            "false"
        }
    );
    Ok(if decision.independent {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_DEPENDENT)
    })
}

fn discover(args: DiscoverArgs) -> Result<ExitCode> {
    let data = SampleMatrix::read_csv_path(&args.data)?;
    let vars = data.names().to_vec();
    let delta_max = args.delta_max.unwrap_or(vars.len().saturating_sub(2));
    let truth: Option<Dag> = match &args.truth {
        Some(path) => Some(Dag::from_text(&fs::read_to_string(path)?)?),
        None => None,
    };

    let run_with = |tester: &dyn vmci::citest::CiTester| -> Result<DiscoveryResult> {
        match args.algorithm {
            AlgorithmArg::Pc => pc(tester, &vars, delta_max),
            AlgorithmArg::Gs => gs(tester, &vars),
        }
    };
    let result = match args.tester {
        TesterArg::Vmci => {
            let config = CiTesterConfig {
                i_min: args.imin,
                beta: args.beta,
                gamma: args.gamma,
                floor: args.floor,
                alpha: args.alpha,
                base_seed: args.seed,
                ..CiTesterConfig::default()
            };
            run_with(&VmCiTester::new(&data, config))?
        }
        TesterArg::Gauss => run_with(&GaussianPcTester::new(&data, args.alpha))?,
        TesterArg::Oracle => {
            let dag = truth.as_ref().ok_or_else(|| {
                Error::InvalidParameter("--tester oracle requires --truth".into())
            })?;
            run_with(&OracleCiTester::new(dag))?
        }
    };

    fs::write(&args.out, result.graph.to_text())?;
    println!("tester = {}", result.tester_name);
    println!("ci_test_count = {}", result.ci_test_count);
    println!("edges = {}", result.graph.n_edges());
    if let Some(dag) = &truth {
        let essential = dag.essential_graph();
        let loss = structural_loss(&result.graph, &essential)?;
        println!("structural_loss = {loss}");
    }
    println!("wrote {}", args.out.display());
    Ok(ExitCode::SUCCESS)
}

fn experiment(args: ExperimentArgs) -> Result<ExitCode> {
    let mut config = ExperimentConfig::from_file(&args.config)?;
    for assignment in &args.set {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got `{assignment}`")))?;
        config.set(key.trim(), value.trim())?;
    }
    if let Some(out) = &args.out {
        config.set("out", &out.display().to_string())?;
    }
    if let Some(r) = args.replications {
        config.set("replications", &r.to_string())?;
    }
    if let Some(s) = args.root_seed {
        config.set("root_seed", &s.to_string())?;
    }
    if let Some(sizes) = &args.sample_sizes {
        config.set("sample_sizes", sizes)?;
    }
    config.validate()?;
    let rows = run_experiment(&config)?;
    let file = fs::File::create(&config.out)?;
    write_rows_csv(&rows, file)?;
    println!(
        "experiment = {}\nrows = {}\nwrote {}",
        config.experiment.as_str(),
        rows.len(),
        config.out
    );
    Ok(ExitCode::SUCCESS)
}
