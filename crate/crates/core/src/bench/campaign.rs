//! Seeded experiment campaigns over problems x algorithms x runs.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::acquisition::AcquisitionConfig;
use crate::bench::problems::TestProblem;
use crate::bench::stats::{mean, std_dev, wilcoxon_paired, MIN_PAIRS};
use crate::bo::{derive_seed, run, Algorithm, EnsembleSource, OutputScaling, RunConfig, RunTrace};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AlgorithmSpec {
    GpBo,
    /// WBGP-BO with this many ensemble members sampled from the pool.
    Wbgp(usize),
}

impl AlgorithmSpec {
    pub const DEFAULT_SET: [AlgorithmSpec; 3] = [AlgorithmSpec::GpBo, AlgorithmSpec::Wbgp(16), AlgorithmSpec::Wbgp(32)];

    pub fn label(&self) -> String {
        match self {
            AlgorithmSpec::GpBo => "GP-BO".to_string(),
            AlgorithmSpec::Wbgp(n) => format!("WBGP-BO-N{n}"),
        }
    }

    pub fn algorithm(&self) -> Algorithm {
        match self {
            AlgorithmSpec::GpBo => Algorithm::GpBo,
            AlgorithmSpec::Wbgp(n) => Algorithm::WbgpBo(EnsembleSource::Sampled(*n)),
        }
    }
}

impl fmt::Display for AlgorithmSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for AlgorithmSpec {
    type Err = Error;

    /// Accepts `gpbo` and `wbgp<N>` (case-insensitive, dashes ignored).
    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.trim().to_ascii_lowercase().chars().filter(|c| *c != '-' && *c != '_').collect();
        if key == "gpbo" {
            return Ok(AlgorithmSpec::GpBo);
        }
        key.strip_prefix("wbgpbo")
            .or_else(|| key.strip_prefix("wbgp"))
            .map(|n| n.trim_start_matches('n'))
            .and_then(|n| n.parse::<usize>().ok())
            .filter(|n| *n > 0)
            .map(AlgorithmSpec::Wbgp)
            .ok_or_else(|| Error::Unknown { kind: "algorithm", name: s.to_string() })
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub problems: Vec<TestProblem>,
    pub algorithms: Vec<AlgorithmSpec>,
    pub n_runs: usize,
    pub n_iters: usize,
    pub n_init: usize,
    pub acquisition: AcquisitionConfig,
    pub master_seed: u64,
    pub output_scaling: OutputScaling,
    /// Worker threads; `0` lets rayon decide.
    pub jobs: usize,
}

impl CampaignConfig {
    pub fn new(problems: Vec<TestProblem>, algorithms: Vec<AlgorithmSpec>) -> Self {
        Self {
            problems,
            algorithms,
            n_runs: 30,
            n_iters: 30,
            n_init: 5,
            acquisition: AcquisitionConfig::default(),
            master_seed: 42,
            output_scaling: OutputScaling::default(),
            jobs: 0,
        }
    }

    /// Seed shared by every algorithm at a given `(problem, run)`.
    pub fn run_seed(&self, problem: &TestProblem, run: usize) -> u64 {
        derive_seed(self.master_seed ^ name_hash(problem.name), run as u64)
    }

    fn run_config(&self, algorithm: AlgorithmSpec, seed: u64) -> RunConfig {
        let mut cfg = RunConfig::new(algorithm.algorithm(), seed);
        cfg.n_init = self.n_init;
        cfg.n_iters = self.n_iters;
        cfg.acquisition = self.acquisition;
        cfg.output_scaling = self.output_scaling;
        cfg
    }
}

// FNV-1a
fn name_hash(name: &str) -> u64 {
    name.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

#[derive(Clone, Debug)]
pub struct RunRecord {
    pub problem: &'static str,
    pub algorithm: AlgorithmSpec,
    pub run: usize,
    pub seed: u64,
    pub outcome: std::result::Result<RunTrace, String>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PValue {
    /// Baseline cell, missing baseline, or too few paired runs.
    NotApplicable,
    /// Every paired difference was zero.
    Degenerate,
    Value(f64),
}

#[derive(Clone, Debug)]
pub struct CellSummary {
    pub problem: &'static str,
    pub algorithm: AlgorithmSpec,
    /// Final best-observed value per run index; `None` where the run failed.
    pub finals: Vec<Option<f64>>,
    pub mean: f64,
    pub std: f64,
    pub p_value: PValue,
}

impl CellSummary {
    pub fn successes(&self) -> Vec<f64> {
        self.finals.iter().flatten().copied().collect()
    }

    pub fn n_failed(&self) -> usize {
        self.finals.iter().filter(|f| f.is_none()).count()
    }

    pub fn is_complete(&self) -> bool {
        self.n_failed() == 0
    }
}

#[derive(Clone, Debug, Default)]
pub struct CampaignResult {
    pub n_runs: usize,
    pub cells: Vec<CellSummary>,
}

impl CampaignResult {
    pub fn cell(&self, problem: &str, algorithm: AlgorithmSpec) -> Option<&CellSummary> {
        self.cells.iter().find(|c| c.problem == problem && c.algorithm == algorithm)
    }
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub config: CampaignConfig,
    pub result: CampaignResult,
    pub runs: Vec<RunRecord>,
}

/// Executes every `(problem, algorithm, run)` and aggregates the finals.
///
/// Runs execute on a pool of `config.jobs` threads; results are collected in
/// job order so the outcome does not depend on the worker count. A failed
/// run is recorded and the campaign continues.
pub fn run_campaign(config: &CampaignConfig) -> Result<Campaign> {
    config.acquisition.validate()?;
    if config.n_init == 0 {
        return Err(Error::InvalidConfig("n_init must be at least 1".into()));
    }

    let jobs: Vec<(usize, AlgorithmSpec, usize)> = (0..config.problems.len())
        .flat_map(|p| config.algorithms.iter().flat_map(move |&a| (0..config.n_runs).map(move |r| (p, a, r))))
        .collect();

    let execute = |&(p, algorithm, run_idx): &(usize, AlgorithmSpec, usize)| {
        let problem = &config.problems[p];
        let seed = config.run_seed(problem, run_idx);
        let outcome = run(problem, &config.run_config(algorithm, seed)).map_err(|e| {
            log::error!("{} {} run {run_idx} failed: {e}", problem.name, algorithm);
            e.to_string()
        });
        RunRecord { problem: problem.name, algorithm, run: run_idx, seed, outcome }
    };

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    let runs: Vec<RunRecord> = pool.install(|| jobs.par_iter().map(execute).collect());

    let result = summarize(config, &runs);
    for cell in result.cells.iter().filter(|c| !c.is_complete()) {
        log::warn!("{} {}: {} of {} runs failed", cell.problem, cell.algorithm, cell.n_failed(), config.n_runs);
    }
    Ok(Campaign { config: config.clone(), result, runs })
}

fn summarize(config: &CampaignConfig, runs: &[RunRecord]) -> CampaignResult {
    let finals_of = |problem: &str, algorithm: AlgorithmSpec| -> Vec<Option<f64>> {
        let mut finals = vec![None; config.n_runs];
        for r in runs.iter().filter(|r| r.problem == problem && r.algorithm == algorithm) {
            finals[r.run] = r.outcome.as_ref().ok().and_then(|t| t.final_best());
        }
        finals
    };

    let mut cells = Vec::new();
    for problem in &config.problems {
        let baseline = config.algorithms.contains(&AlgorithmSpec::GpBo).then(|| finals_of(problem.name, AlgorithmSpec::GpBo));
        for &algorithm in &config.algorithms {
            let finals = finals_of(problem.name, algorithm);
            let ok: Vec<f64> = finals.iter().flatten().copied().collect();
            let p_value = match (&baseline, algorithm) {
                (Some(base), AlgorithmSpec::Wbgp(_)) => paired_p_value(&finals, base),
                _ => PValue::NotApplicable,
            };
            cells.push(CellSummary {
                problem: problem.name,
                algorithm,
                mean: if ok.is_empty() { f64::NAN } else { mean(&ok) },
                std: std_dev(&ok),
                finals,
                p_value,
            });
        }
    }
    CampaignResult { n_runs: config.n_runs, cells }
}

fn paired_p_value(finals: &[Option<f64>], baseline: &[Option<f64>]) -> PValue {
    let (a, b): (Vec<f64>, Vec<f64>) = finals
        .iter()
        .zip(baseline)
        .filter_map(|(x, y)| Some((*x)?).zip(*y))
        .unzip();
    if a.len() < MIN_PAIRS {
        return PValue::NotApplicable;
    }
    match wilcoxon_paired(&a, &b) {
        Ok(r) if r.is_degenerate() => PValue::Degenerate,
        Ok(r) => PValue::Value(r.p_value),
        Err(_) => PValue::NotApplicable,
    }
}
