//! The alpha sweep: build the candidate pool once, then optimize and
//! simulate every regularization weight.

use std::path::Path;

use comac_core::optimizer::{optimize, OptimizeOutcome, SUPPORT_CUTOFF};
use comac_core::simulator::{monte_carlo, AveragedTrace, Scenario};
use comac_core::{CandidatePool, Topology};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{trace_path, write_summary_json, write_trace_csv, AlphaSummary, SupportEntry, SUMMARY_FILE};

#[derive(Debug, Error)]
pub enum SweepError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] comac_core::Error),
    #[error("cannot write {path}: {source}")]
    Io { path: String, source: std::io::Error },
}

impl SweepError {
    /// 1 for configuration problems, 3 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            SweepError::Io { .. } => 3,
            SweepError::Core(comac_core::Error::Io(_)) => 3,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlphaRun {
    pub summary: AlphaSummary,
    pub outcome: OptimizeOutcome,
    /// `None` when the optimizer reported the alpha infeasible.
    pub trace: Option<AveragedTrace>,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub topology: Topology,
    pub pool: CandidatePool,
    pub runs: Vec<AlphaRun>,
}

impl SweepResult {
    pub fn all_feasible(&self) -> bool {
        self.runs.iter().all(|r| r.summary.feasible)
    }

    pub fn summaries(&self) -> Vec<AlphaSummary> {
        self.runs.iter().map(|r| r.summary.clone()).collect()
    }

    /// 0 when every alpha was feasible, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.all_feasible() {
            0
        } else {
            2
        }
    }
}

pub fn build_topology(config: &ExperimentConfig) -> Result<Topology, SweepError> {
    let topology = match &config.topology_file {
        Some(path) => Topology::load(path)?,
        None => Topology::generate(config.n_nodes, config.area_side, config.topology_seed)?,
    };
    if topology.n() != config.n_nodes {
        return Err(ConfigError::Constraint {
            key: "n_nodes",
            message: format!("topology file has {} nodes but n_nodes = {}", topology.n(), config.n_nodes),
        }
        .into());
    }
    Ok(topology)
}

pub fn build_pool(config: &ExperimentConfig, topology: &Topology) -> Result<CandidatePool, SweepError> {
    Ok(CandidatePool::build(
        topology,
        config.cluster_size_min,
        config.cluster_size_max,
        &config.energy_params(),
    )?)
}

fn run_alpha(config: &ExperimentConfig, pool: &CandidatePool, alpha: f64) -> Result<AlphaRun, SweepError> {
    let outcome = optimize(&pool.candidates, &pool.costs, pool.n, &config.optimizer_options(alpha))?;
    let dist = outcome.distribution();
    let mut summary = AlphaSummary {
        alpha,
        feasible: outcome.is_feasible(),
        xi: dist.xi,
        objective: dist.objective,
        expected_cost_l1: dist.expected_cost_l1,
        support: Vec::new(),
        mean_iterations_to_threshold: None,
        mean_energy_at_threshold: None,
    };
    if !outcome.is_feasible() {
        return Ok(AlphaRun { summary, outcome, trace: None });
    }

    let mut support: Vec<SupportEntry> = dist
        .p
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > SUPPORT_CUTOFF)
        .map(|(i, &p)| SupportEntry {
            head: pool.candidates[i].head(),
            members: pool.candidates[i].members().to_vec(),
            probability: p,
        })
        .collect();
    support.sort_by(|a, b| b.probability.total_cmp(&a.probability));
    summary.support = support;

    let scenario = Scenario {
        candidates: &pool.candidates,
        costs: &pool.costs,
        p: &dist.p,
        n: pool.n,
        init_low: config.init_low,
        init_high: config.init_high,
        threshold: config.error_threshold,
        max_iters: config.max_iterations,
    };
    let trace = monte_carlo(&scenario, config.runs, config.sim_base_seed)?;
    summary.mean_iterations_to_threshold = Some(trace.mean_iterations_to_threshold);
    summary.mean_energy_at_threshold = Some(trace.mean_energy_at_threshold);
    Ok(AlphaRun { summary, outcome, trace: Some(trace) })
}

/// Runs the whole experiment in memory. Every alpha shares the candidate
/// pool and the simulation seeds.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult, SweepError> {
    config.validate()?;
    let topology = build_topology(config)?;
    let pool = build_pool(config, &topology)?;
    let runs = config
        .alphas
        .par_iter()
        .map(|&alpha| run_alpha(config, &pool, alpha))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepResult { topology, pool, runs })
}

/// Writes `trace_alpha=<alpha>.csv` for every feasible alpha and `summary.json`.
pub fn write_outputs(result: &SweepResult, dir: &Path) -> Result<(), SweepError> {
    let io = |path: &Path| {
        let path = path.display().to_string();
        move |source| SweepError::Io { path, source }
    };
    std::fs::create_dir_all(dir).map_err(io(dir))?;
    for run in &result.runs {
        if let Some(trace) = &run.trace {
            let path = trace_path(dir, run.summary.alpha);
            write_trace_csv(trace, run.summary.alpha, &path).map_err(io(&path))?;
        }
    }
    let path = dir.join(SUMMARY_FILE);
    write_summary_json(&result.summaries(), &path).map_err(io(&path))
}
