//! Experiment harness: seeded trials of any algorithm on generated or
//! loaded data, averaged into CSV rows normalized against parallel Lloyd.

use std::collections::HashMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::clusterers::{gonzalez_on, local_search_run, LloydConfig, LocalSearchConfig};
use crate::datagen::{generate, DataGenConfig};
use crate::error::{Error, Result};
use crate::metric::{evaluate, ClusteringSolution, Dataset, ObjectiveKind, PointId, WeightedPointSet};
use crate::mr::{ClusterConfig, Job, JobTrace, KeyValue, TimeMode};
use crate::pipelines::{
    mapreduce_divide_kmedian, mapreduce_kcenter, mapreduce_kmedian, parallel_lloyd, FinalClusterer,
    PipelineResult,
};
use crate::seed::derive_seed;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    ParallelLloyd,
    DivideLloyd,
    DivideLocalSearch,
    SamplingLloyd,
    SamplingLocalSearch,
    LocalSearch,
    Gonzalez,
    MrKCenter,
}

impl Algorithm {
    pub const ALL: [Algorithm; 8] = [
        Algorithm::ParallelLloyd,
        Algorithm::DivideLloyd,
        Algorithm::DivideLocalSearch,
        Algorithm::SamplingLloyd,
        Algorithm::SamplingLocalSearch,
        Algorithm::LocalSearch,
        Algorithm::Gonzalez,
        Algorithm::MrKCenter,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::ParallelLloyd => "parallel-lloyd",
            Algorithm::DivideLloyd => "divide-lloyd",
            Algorithm::DivideLocalSearch => "divide-localsearch",
            Algorithm::SamplingLloyd => "sampling-lloyd",
            Algorithm::SamplingLocalSearch => "sampling-localsearch",
            Algorithm::LocalSearch => "localsearch",
            Algorithm::Gonzalez => "gonzalez",
            Algorithm::MrKCenter => "mr-kcenter",
        }
    }

    /// Objective the algorithm optimizes and is scored under.
    pub fn objective(self) -> ObjectiveKind {
        match self {
            Algorithm::Gonzalez | Algorithm::MrKCenter => ObjectiveKind::KCenter,
            _ => ObjectiveKind::KMedian,
        }
    }

    pub fn needs_coordinates(self) -> bool {
        matches!(
            self,
            Algorithm::ParallelLloyd | Algorithm::DivideLloyd | Algorithm::SamplingLloyd
        )
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.id() == s)
            .ok_or_else(|| Error::usage(format!("unknown algorithm '{s}'")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum DataSource {
    Generated(DataGenConfig),
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSpec {
    pub algorithm: Algorithm,
    pub data: DataSource,
    pub k: usize,
    pub epsilon: f64,
    pub machines: usize,
    pub trials: usize,
    pub seed: u64,
    pub deterministic_time: bool,
    pub lloyd_max_iterations: usize,
    pub lloyd_tolerance: f64,
    pub local_search_factor: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            algorithm: Algorithm::SamplingLocalSearch,
            data: DataSource::Generated(DataGenConfig::default()),
            k: 25,
            epsilon: 0.1,
            machines: 100,
            trials: 3,
            seed: 0,
            deterministic_time: false,
            lloyd_max_iterations: LloydConfig::default().max_iterations,
            lloyd_tolerance: LloydConfig::default().convergence_tol,
            local_search_factor: LocalSearchConfig::default().improvement_factor,
        }
    }
}

/// Seeds used by one trial.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TrialSeeds {
    pub data: u64,
    pub cluster: u64,
    pub algorithm: u64,
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::usage("trials must be at least 1"));
        }
        if self.k == 0 {
            return Err(Error::usage("k must be at least 1"));
        }
        if self.machines == 0 {
            return Err(Error::usage("machines must be at least 1"));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::usage("epsilon must be in (0, 1)"));
        }
        if let DataSource::Generated(cfg) = &self.data {
            if cfg.k_true == 0 || cfg.k_true > cfg.n || cfg.dim == 0 || !(cfg.sigma > 0.0) {
                return Err(Error::usage("invalid data generator settings"));
            }
        }
        Ok(())
    }

    pub fn trial_seeds(&self, trial: usize) -> TrialSeeds {
        let base = derive_seed(self.seed, &[trial as u64]);
        TrialSeeds {
            data: derive_seed(base, &[0]),
            cluster: derive_seed(base, &[1]),
            algorithm: derive_seed(base, &[2]),
        }
    }

    /// The dataset a trial runs on. Generated data is fresh per trial.
    pub fn dataset(&self, trial: usize) -> Result<Dataset> {
        match &self.data {
            DataSource::Generated(cfg) => Ok(generate(&DataGenConfig {
                seed: self.trial_seeds(trial).data,
                ..cfg.clone()
            })),
            DataSource::File(path) => Dataset::load(path),
        }
    }

    fn cluster(&self, seeds: TrialSeeds) -> ClusterConfig {
        let mode = if self.deterministic_time {
            TimeMode::WordCount
        } else {
            TimeMode::WallClock
        };
        ClusterConfig::new(self.machines, seeds.cluster).with_time_mode(mode)
    }

    fn lloyd(&self, seed: u64) -> LloydConfig {
        LloydConfig {
            max_iterations: self.lloyd_max_iterations,
            convergence_tol: self.lloyd_tolerance,
            seed,
        }
    }

    fn local_search(&self, seed: u64) -> LocalSearchConfig {
        LocalSearchConfig {
            improvement_factor: self.local_search_factor,
            max_iterations: None,
            seed,
        }
    }

    /// Parameters of one trial.
    pub fn params(&self, trial: usize) -> AlgorithmParams {
        let seeds = self.trial_seeds(trial);
        AlgorithmParams {
            k: self.k,
            epsilon: self.epsilon,
            cluster: self.cluster(seeds),
            lloyd: self.lloyd(seeds.algorithm),
            local_search: self.local_search(seeds.algorithm),
        }
    }

    /// Runs `algorithm` for one trial on `ds`.
    pub fn run_trial(&self, algorithm: Algorithm, ds: &Dataset, trial: usize) -> Result<PipelineResult> {
        run_algorithm(algorithm, ds, &self.params(trial))
    }
}

/// Everything an algorithm run needs besides the data.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgorithmParams {
    pub k: usize,
    pub epsilon: f64,
    /// Also seeds sampling coins and the k-center traversal start.
    pub cluster: ClusterConfig,
    pub lloyd: LloydConfig,
    pub local_search: LocalSearchConfig,
}

/// Runs any algorithm as a job on the simulated cluster. Sequential
/// baselines run as one round on one machine.
pub fn run_algorithm(algorithm: Algorithm, ds: &Dataset, params: &AlgorithmParams) -> Result<PipelineResult> {
    let k = params.k;
    if k == 0 || k > ds.len() {
        return Err(Error::usage(format!(
            "k = {k} must be in [1, {}], the size of the dataset",
            ds.len()
        )));
    }
    if algorithm.needs_coordinates() && !ds.is_euclidean() {
        return Err(Error::usage(format!("{algorithm} needs a euclidean dataset")));
    }
    let cluster = &params.cluster;
    let lloyd = FinalClusterer::Lloyd(params.lloyd.clone());
    let local = FinalClusterer::LocalSearch(params.local_search.clone());
    match algorithm {
        Algorithm::ParallelLloyd => parallel_lloyd(ds, k, &params.lloyd, cluster),
        Algorithm::DivideLloyd => mapreduce_divide_kmedian(ds, k, None, &lloyd, cluster),
        Algorithm::DivideLocalSearch => mapreduce_divide_kmedian(ds, k, None, &local, cluster),
        Algorithm::SamplingLloyd => mapreduce_kmedian(ds, k, params.epsilon, &lloyd, cluster),
        Algorithm::SamplingLocalSearch => mapreduce_kmedian(ds, k, params.epsilon, &local, cluster),
        Algorithm::MrKCenter => mapreduce_kcenter(ds, k, params.epsilon, cluster),
        Algorithm::LocalSearch => sequential(
            ds,
            cluster,
            |ds| {
                let ws = WeightedPointSet::all(ds);
                let out = local_search_run(ds, &ws, k, &params.local_search)?;
                Ok((out.solution.centers, (out.evaluations + 1) * ds.len() as u64))
            },
            ObjectiveKind::KMedian,
        ),
        Algorithm::Gonzalez => sequential(
            ds,
            cluster,
            |ds| {
                let centers = gonzalez_on(ds, &ds.all_ids(), k, cluster.seed)?;
                Ok((centers, (k * ds.len()) as u64))
            },
            ObjectiveKind::KCenter,
        ),
    }
}

/// A sequential baseline as a single-machine, single-round job that also
/// scores its own solution.
fn sequential<F>(ds: &Dataset, cluster: &ClusterConfig, algo: F, kind: ObjectiveKind) -> Result<PipelineResult>
where
    F: Fn(&Dataset) -> Result<(Vec<PointId>, u64)>,
{
    let mut job = Job::new(cluster)?;
    let n = ds.len() as u64;
    let out = job.round(vec![KeyValue::new(0, (), n)], |ctx, _| {
        let (centers, work) = algo(ds)?;
        let solution = ClusteringSolution::evaluate(ds, &centers, kind, None)?;
        ctx.charge(work + n * solution.centers.len() as u64);
        Ok(vec![KeyValue::new(0, solution, 1)])
    })?;
    let solution = out.into_iter().next().expect("one output").value;
    Ok(PipelineResult {
        solution,
        trace: job.finish(),
        sample_size: ds.len(),
        sample_iterations: 0,
    })
}

/// Per-spec averages; one CSV line.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub algorithm: Algorithm,
    pub n: usize,
    pub k: usize,
    pub alpha: Option<f64>,
    pub sigma: Option<f64>,
    pub epsilon: f64,
    pub mean_cost: f64,
    /// Mean over trials of cost divided by parallel Lloyd's cost on the same
    /// trial data under the same objective; absent without coordinates.
    pub mean_relative_cost: Option<f64>,
    pub mean_sim_time_seconds: f64,
    pub rounds: usize,
    pub peak_machine_words: u64,
    /// Mean size of the set handed to the final clusterer.
    pub sample_size: Option<f64>,
}

pub const CSV_HEADER: &str = "algorithm,n,k,alpha,sigma,epsilon,mean_cost,mean_relative_cost,mean_sim_time_seconds,rounds,peak_machine_words,sample_size";

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

impl ExperimentRow {
    pub fn to_csv(&self) -> String {
        format!(
            "{},{},{},{},{},{},{:.6},{},{:.6},{},{},{}",
            self.algorithm,
            self.n,
            self.k,
            opt(self.alpha, |a| a.to_string()),
            opt(self.sigma, |s| s.to_string()),
            self.epsilon,
            self.mean_cost,
            opt(self.mean_relative_cost, |r| format!("{r:.3}")),
            self.mean_sim_time_seconds,
            self.rounds,
            self.peak_machine_words,
            opt(self.sample_size, |s| format!("{s:.1}")),
        )
    }
}

/// Runs experiments, reusing parallel Lloyd reference costs across specs
/// that share data, seeds and cluster shape.
#[derive(Debug, Default)]
pub struct Runner {
    reference: HashMap<String, ClusteringSolution>,
}

impl Runner {
    pub fn new() -> Self {
        Runner::default()
    }

    fn reference_key(spec: &ExperimentSpec, trial: usize) -> String {
        format!(
            "{:?}|{}|{}|{}|{}|{}|{}|{}",
            spec.data, spec.seed, trial, spec.k, spec.machines, spec.lloyd_max_iterations, spec.lloyd_tolerance, spec.deterministic_time
        )
    }

    fn reference(&mut self, spec: &ExperimentSpec, ds: &Dataset, trial: usize, own: &PipelineResult) -> Result<ClusteringSolution> {
        if spec.algorithm == Algorithm::ParallelLloyd {
            return Ok(own.solution.clone());
        }
        let key = Self::reference_key(spec, trial);
        if let Some(sol) = self.reference.get(&key) {
            return Ok(sol.clone());
        }
        let sol = spec.run_trial(Algorithm::ParallelLloyd, ds, trial)?.solution;
        self.reference.insert(key, sol.clone());
        Ok(sol)
    }

    pub fn run_experiment(&mut self, spec: &ExperimentSpec) -> Result<ExperimentRow> {
        spec.validate()?;
        let kind = spec.algorithm.objective();
        let mut cost = 0.0;
        let mut relative = Some(0.0);
        let mut time = 0.0;
        let mut rounds = 0;
        let mut peak = 0;
        let mut sample = 0.0;
        let mut n = 0;
        let loaded = match &spec.data {
            DataSource::File(path) => Some(Dataset::load(path)?),
            DataSource::Generated(_) => None,
        };
        for trial in 0..spec.trials {
            let generated;
            let ds = match &loaded {
                Some(ds) => ds,
                None => {
                    generated = spec.dataset(trial)?;
                    &generated
                }
            };
            n = ds.len();
            let res = spec.run_trial(spec.algorithm, ds, trial)?;
            cost += res.solution.objective;
            time += res.trace.total_time();
            rounds = rounds.max(res.trace.round_count());
            peak = peak.max(res.trace.peak_memory());
            sample += res.sample_size as f64;
            relative = match relative {
                Some(acc) if ds.is_euclidean() => {
                    let reference = self.reference(spec, ds, trial, &res)?;
                    let base = evaluate(ds, &reference.centers, kind, None)?;
                    let own = res.solution.objective;
                    let ratio = if base == 0.0 && own == 0.0 { 1.0 } else { own / base };
                    Some(acc + ratio)
                }
                _ => None,
            };
        }
        let trials = spec.trials as f64;
        let (alpha, sigma) = match &spec.data {
            DataSource::Generated(cfg) => (Some(cfg.zipf_alpha), Some(cfg.sigma)),
            DataSource::File(_) => (None, None),
        };
        let reports_sample = !matches!(spec.algorithm, Algorithm::LocalSearch | Algorithm::Gonzalez);
        Ok(ExperimentRow {
            algorithm: spec.algorithm,
            n,
            k: spec.k,
            alpha,
            sigma,
            epsilon: spec.epsilon,
            mean_cost: cost / trials,
            mean_relative_cost: relative.map(|r| r / trials),
            mean_sim_time_seconds: time / trials,
            rounds,
            peak_machine_words: peak,
            sample_size: reports_sample.then_some(sample / trials),
        })
    }

    pub fn run_suite(&mut self, specs: &[ExperimentSpec]) -> Result<String> {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for spec in specs {
            out.push_str(&self.run_experiment(spec)?.to_csv());
            out.push('\n');
        }
        Ok(out)
    }
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentRow> {
    Runner::new().run_experiment(spec)
}

pub fn run_suite(specs: &[ExperimentSpec]) -> Result<String> {
    Runner::new().run_suite(specs)
}

/// Trace of a single trial, for inspection.
pub fn trial_trace(spec: &ExperimentSpec, trial: usize) -> Result<JobTrace> {
    let ds = spec.dataset(trial)?;
    Ok(spec.run_trial(spec.algorithm, &ds, trial)?.trace)
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::parse(line, format!("invalid value '{value}' for '{key}'")))
}

fn parse_bool(line: usize, key: &str, value: &str) -> Result<bool> {
    match value {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        _ => Err(Error::parse(line, format!("invalid value '{value}' for '{key}'"))),
    }
}

/// Parses a suite: one experiment per line as whitespace-separated
/// `key=value` pairs over `defaults`. `#` starts a comment; blank lines are
/// skipped. Generated data plants `k` clusters unless `k-true` is given.
pub fn parse_suite(text: &str, defaults: &ExperimentSpec) -> Result<Vec<ExperimentSpec>> {
    let mut specs = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut spec = defaults.clone();
        let mut gen = match &defaults.data {
            DataSource::Generated(cfg) => cfg.clone(),
            DataSource::File(_) => DataGenConfig::default(),
        };
        let mut file: Option<PathBuf> = match &defaults.data {
            DataSource::File(p) => Some(p.clone()),
            DataSource::Generated(_) => None,
        };
        let mut k_true = None;
        for pair in body.split_whitespace() {
            let (key, value) = pair
                .split_once('=')
                .ok_or_else(|| Error::parse(line, format!("expected key=value, found '{pair}'")))?;
            let key = key.replace('_', "-");
            match key.as_str() {
                "algorithm" => {
                    spec.algorithm = value.parse().map_err(|_| Error::parse(line, format!("unknown algorithm '{value}'")))?
                }
                "n" => {
                    gen.n = parse_value(line, &key, value)?;
                    file = None;
                }
                "k" => spec.k = parse_value(line, &key, value)?,
                "epsilon" => spec.epsilon = parse_value(line, &key, value)?,
                "sigma" => gen.sigma = parse_value(line, &key, value)?,
                "alpha" | "zipf-alpha" => gen.zipf_alpha = parse_value(line, &key, value)?,
                "zipf-decreasing" => gen.zipf_decreasing = parse_bool(line, &key, value)?,
                "k-true" => k_true = Some(parse_value(line, &key, value)?),
                "dim" => gen.dim = parse_value(line, &key, value)?,
                "machines" => spec.machines = parse_value(line, &key, value)?,
                "trials" => spec.trials = parse_value(line, &key, value)?,
                "seed" => spec.seed = parse_value(line, &key, value)?,
                "dataset" => file = Some(PathBuf::from(value)),
                "lloyd-max-iter" => spec.lloyd_max_iterations = parse_value(line, &key, value)?,
                "lloyd-tol" => spec.lloyd_tolerance = parse_value(line, &key, value)?,
                "ls-factor" => spec.local_search_factor = parse_value(line, &key, value)?,
                _ => return Err(Error::parse(line, format!("unknown key '{key}'"))),
            }
        }
        // Planted clusters follow k unless given.
        gen.k_true = k_true.unwrap_or(spec.k);
        spec.data = match file {
            Some(p) => DataSource::File(p),
            None => DataSource::Generated(gen),
        };
        spec.validate().map_err(|e| Error::parse(line, e.to_string()))?;
        specs.push(spec);
    }
    Ok(specs)
}
