//! Monte-Carlo replay of the asynchronous clustered consensus process.
//!
//! Time is a global slot counter; in every slot exactly one cluster is drawn
//! from `p` and its members are replaced by their mean (the noiseless result
//! of the over-the-air sum after channel inversion). A centralized observer
//! stops the run once the relative error drops below a threshold.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::candidates::ClusterCandidate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkState {
    pub y: Vec<f64>,
    pub t: usize,
}

impl NetworkState {
    pub fn new(y: Vec<f64>) -> Self {
        Self { y, t: 0 }
    }

    pub fn mean(&self) -> f64 {
        self.y.iter().sum::<f64>() / self.y.len() as f64
    }
}

/// Readings drawn i.i.d. uniformly from `[low, high]`.
pub fn draw_initial_state<R: Rng + ?Sized>(n: usize, low: f64, high: f64, rng: &mut R) -> Result<NetworkState> {
    if !(low <= high) || !low.is_finite() || !high.is_finite() {
        return Err(Error::InvalidConfig(format!("init_low ({low}) must not exceed init_high ({high})")));
    }
    let y = if low == high {
        vec![low; n]
    } else {
        (0..n).map(|_| rng.random_range(low..=high)).collect()
    };
    Ok(NetworkState::new(y))
}

/// Categorical sampler over candidate indices.
#[derive(Debug, Clone)]
pub struct ClusterSampler(WeightedIndex<f64>);

impl ClusterSampler {
    pub fn new(p: &[f64]) -> Result<Self> {
        WeightedIndex::new(p)
            .map(Self)
            .map_err(|e| Error::InvalidArgument(format!("bad activation probabilities: {e}")))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.0.sample(rng)
    }
}

/// One categorical draw from `p`.
pub fn sample_cluster<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> Result<usize> {
    Ok(ClusterSampler::new(p)?.sample(rng))
}

/// Replaces every member's reading with the member mean. Equivalent to
/// `y <- W_i y`.
pub fn consensus_step(state: &mut NetworkState, candidate: &ClusterCandidate) {
    let members = candidate.members();
    let mean = members.iter().map(|&j| state.y[j]).sum::<f64>() / members.len() as f64;
    for &j in members {
        state.y[j] = mean;
    }
    state.t += 1;
}

/// `||y(t) - mean(y(0)) 1||^2 / ||y(0)||^2`.
pub fn relative_error(state: &NetworkState, initial: &NetworkState) -> Result<f64> {
    let norm0: f64 = initial.y.iter().map(|x| x * x).sum();
    if norm0 == 0.0 {
        return Err(Error::UndefinedMetric("initial state is all zero".into()));
    }
    let target = initial.mean();
    Ok(squared_deviation(&state.y, target) / norm0)
}

fn squared_deviation(y: &[f64], target: f64) -> f64 {
    y.iter().map(|x| (x - target) * (x - target)).sum()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceRecord {
    pub t: usize,
    pub relative_error: f64,
    pub cumulative_energy: f64,
}

/// One run. `records[t]` describes the state after `t` activations, starting
/// from `t = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimulationTrace {
    pub records: Vec<TraceRecord>,
    pub terminated_at: Option<usize>,
    /// Largest `|mean(y(t)) - mean(y(0))|` seen along the run.
    pub max_mean_drift: f64,
    /// Largest one-step increase of the relative error (0 if it never grew).
    pub max_error_increase: f64,
}

impl SimulationTrace {
    pub fn iterations(&self) -> usize {
        self.records.len() - 1
    }

    pub fn final_energy(&self) -> f64 {
        self.records.last().map_or(0.0, |r| r.cumulative_energy)
    }
}

/// Runs one trial until the relative error falls strictly below `threshold`
/// or `max_iters` activations have happened.
pub fn run_trial<R: Rng + ?Sized>(
    initial: &NetworkState,
    sampler: &ClusterSampler,
    candidates: &[ClusterCandidate],
    costs: &[f64],
    threshold: f64,
    max_iters: usize,
    rng: &mut R,
) -> Result<SimulationTrace> {
    if !(threshold > 0.0) {
        return Err(Error::InvalidConfig(format!("error threshold must be > 0 (got {threshold})")));
    }
    if costs.len() != candidates.len() {
        return Err(Error::InvalidArgument("costs and candidates differ in length".into()));
    }
    let mean0 = initial.mean();
    let mut state = initial.clone();
    let mut energy = 0.0;
    let mut error = relative_error(&state, initial)?;
    let mut records = vec![TraceRecord { t: 0, relative_error: error, cumulative_energy: 0.0 }];
    let mut trace_drift = 0.0f64;
    let mut max_increase = 0.0f64;
    let mut terminated_at = (error < threshold).then_some(0);

    while terminated_at.is_none() && state.t < max_iters {
        let i = sampler.sample(rng);
        consensus_step(&mut state, &candidates[i]);
        energy += costs[i];
        let next = relative_error(&state, initial)?;
        max_increase = max_increase.max(next - error);
        error = next;
        trace_drift = trace_drift.max((state.mean() - mean0).abs());
        records.push(TraceRecord { t: state.t, relative_error: error, cumulative_energy: energy });
        if error < threshold {
            terminated_at = Some(state.t);
        }
    }

    Ok(SimulationTrace { records, terminated_at, max_mean_drift: trace_drift, max_error_increase: max_increase })
}

/// Everything a Monte-Carlo experiment needs besides its seed.
#[derive(Debug, Clone, Copy)]
pub struct Scenario<'a> {
    pub candidates: &'a [ClusterCandidate],
    pub costs: &'a [f64],
    pub p: &'a [f64],
    pub n: usize,
    pub init_low: f64,
    pub init_high: f64,
    pub threshold: f64,
    pub max_iters: usize,
}

/// Pointwise run averages. Runs that stopped early are right-extended with
/// their final error and energy.
#[derive(Debug, Clone, PartialEq)]
pub struct AveragedTrace {
    pub mean_error: Vec<f64>,
    pub mean_energy: Vec<f64>,
    pub runs: usize,
    pub terminated_runs: usize,
    pub mean_iterations_to_threshold: f64,
    pub mean_energy_at_threshold: f64,
    pub max_mean_drift: f64,
    pub max_error_increase: f64,
}

impl AveragedTrace {
    pub fn len(&self) -> usize {
        self.mean_error.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_error.is_empty()
    }

    pub fn final_error(&self) -> f64 {
        *self.mean_error.last().expect("at least one record")
    }
}

/// Runs a single seeded trial of `scenario`: the initial state and the
/// activation sequence both come from `ChaCha8Rng::seed_from_u64(seed)`.
pub fn seeded_trial(scenario: &Scenario<'_>, sampler: &ClusterSampler, seed: u64) -> Result<(NetworkState, SimulationTrace)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let initial = draw_initial_state(scenario.n, scenario.init_low, scenario.init_high, &mut rng)?;
    let trace = run_trial(
        &initial,
        sampler,
        scenario.candidates,
        scenario.costs,
        scenario.threshold,
        scenario.max_iters,
        &mut rng,
    )?;
    Ok((initial, trace))
}

/// Runs `runs` independent trials (run `r` seeded with `base_seed + r`) in
/// parallel and averages them in run order.
pub fn monte_carlo(scenario: &Scenario<'_>, runs: usize, base_seed: u64) -> Result<AveragedTrace> {
    if runs == 0 {
        return Err(Error::InvalidConfig("runs must be >= 1".into()));
    }
    let sampler = ClusterSampler::new(scenario.p)?;
    let traces: Vec<SimulationTrace> = (0..runs as u64)
        .into_par_iter()
        .map(|r| seeded_trial(scenario, &sampler, base_seed.wrapping_add(r)).map(|(_, t)| t))
        .collect::<Result<_>>()?;
    Ok(average_traces(&traces))
}

pub fn average_traces(traces: &[SimulationTrace]) -> AveragedTrace {
    let runs = traces.len();
    let len = traces.iter().map(|t| t.records.len()).max().unwrap_or(0);
    let mut err = vec![0.0; len];
    let mut energy = vec![0.0; len];
    for trace in traces {
        let last = *trace.records.last().expect("trace has a t = 0 record");
        for k in 0..len {
            let r = trace.records.get(k).unwrap_or(&last);
            err[k] += r.relative_error;
            energy[k] += r.cumulative_energy;
        }
    }
    let scale = 1.0 / runs as f64;
    err.iter_mut().for_each(|x| *x *= scale);
    energy.iter_mut().for_each(|x| *x *= scale);
    AveragedTrace {
        mean_error: err,
        mean_energy: energy,
        runs,
        terminated_runs: traces.iter().filter(|t| t.terminated_at.is_some()).count(),
        mean_iterations_to_threshold: traces.iter().map(|t| t.iterations() as f64).sum::<f64>() * scale,
        mean_energy_at_threshold: traces.iter().map(|t| t.final_energy()).sum::<f64>() * scale,
        max_mean_drift: traces.iter().map(|t| t.max_mean_drift).fold(0.0, f64::max),
        max_error_increase: traces.iter().map(|t| t.max_error_increase).fold(0.0, f64::max),
    }
}

/// Checks the mean-square contraction bound `E err(t) <= xi^t err(0)` on an
/// averaged trace, allowing `slack` relative Monte-Carlo error.
/// `initial_error` is in the same units as the trace's error column.
pub fn mse_bound_check(trace: &AveragedTrace, xi: f64, initial_error: f64, slack: f64) -> bool {
    trace
        .mean_error
        .iter()
        .enumerate()
        .all(|(t, &e)| e <= xi.powi(t as i32) * initial_error * (1.0 + slack))
}

pub const DEFAULT_BOUND_SLACK: f64 = 0.10;
