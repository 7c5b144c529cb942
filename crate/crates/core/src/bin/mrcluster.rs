use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use mrcluster::bench::{parse_suite, Algorithm, DataSource, ExperimentSpec, Runner};
use mrcluster::datagen::DataGenConfig;
use mrcluster::Error;

/// Runs clustering experiments on generated or loaded data and prints
/// averaged results as CSV.
#[derive(Parser, Debug)]
#[command(name = "mrcluster", version)]
struct Cli {
    /// parallel-lloyd, divide-lloyd, divide-localsearch, sampling-lloyd,
    /// sampling-localsearch, localsearch, gonzalez or mr-kcenter.
    #[arg(long, default_value = "sampling-localsearch")]
    algorithm: String,
    #[arg(long, default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 25)]
    k: usize,
    /// Planted clusters in generated data; defaults to k.
    #[arg(long)]
    k_true: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 0.1)]
    sigma: f64,
    #[arg(long, default_value_t = 0.0)]
    zipf_alpha: f64,
    /// Weight cluster i by i^-alpha instead of i^alpha.
    #[arg(long)]
    zipf_decreasing: bool,
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 100)]
    machines: usize,
    #[arg(long, default_value_t = 3)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cluster this dataset file instead of generated data.
    #[arg(long)]
    dataset: Option<PathBuf>,
    /// Run every experiment in a suite file; the other flags set defaults.
    #[arg(long)]
    suite: Option<PathBuf>,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    output: Option<PathBuf>,
    /// Charge simulated time by words processed instead of wall time.
    #[arg(long)]
    deterministic_time: bool,
    #[arg(long, default_value_t = 100)]
    lloyd_max_iter: usize,
    #[arg(long, default_value_t = 1e-9)]
    lloyd_tol: f64,
    /// Local search takes a swap only below this fraction of the cost.
    #[arg(long, default_value_t = 0.999)]
    ls_factor: f64,
    /// Write the first trial's generated dataset to this file and exit.
    #[arg(long)]
    write_dataset: Option<PathBuf>,
}

impl Cli {
    fn spec(&self) -> Result<ExperimentSpec, Error> {
        let data = match &self.dataset {
            Some(path) => DataSource::File(path.clone()),
            None => DataSource::Generated(DataGenConfig {
                n: self.n,
                k_true: self.k_true.unwrap_or(self.k),
                zipf_alpha: self.zipf_alpha,
                zipf_decreasing: self.zipf_decreasing,
                sigma: self.sigma,
                dim: self.dim,
                seed: 0,
            }),
        };
        let spec = ExperimentSpec {
            algorithm: self.algorithm.parse::<Algorithm>()?,
            data,
            k: self.k,
            epsilon: self.epsilon,
            machines: self.machines,
            trials: self.trials,
            seed: self.seed,
            deterministic_time: self.deterministic_time,
            lloyd_max_iterations: self.lloyd_max_iter,
            lloyd_tolerance: self.lloyd_tol,
            local_search_factor: self.ls_factor,
        };
        spec.validate()?;
        Ok(spec)
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let spec = cli.spec()?;
    if let Some(path) = &cli.write_dataset {
        return spec.dataset(0)?.save(path);
    }
    let specs = match &cli.suite {
        Some(path) => parse_suite(&fs::read_to_string(path)?, &spec)?,
        None => vec![spec],
    };
    let csv = Runner::new().run_suite(&specs)?;
    match &cli.output {
        Some(path) => fs::write(path, csv)?,
        None => std::io::stdout().write_all(csv.as_bytes())?,
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mrcluster: {e}");
            match e {
                Error::Usage(_) | Error::Parse { .. } => ExitCode::from(2),
                _ => ExitCode::FAILURE,
            }
        }
    }
}
