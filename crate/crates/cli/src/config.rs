//! Experiment configuration: a single flat JSON object.

use std::path::{Path, PathBuf};

use comac_core::{EnergyParams, OptimizerOptions};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid `{key}`: {message}")]
    Constraint { key: &'static str, message: String },
}

fn bad(key: &'static str, message: impl Into<String>) -> ConfigError {
    ConfigError::Constraint { key, message: message.into() }
}

/// Unspecified keys fall back to the reference experiment: 30 nodes in a
/// 50x50 field, small clusters, 1000 runs, threshold 0.1, readings in [0, 30].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub n_nodes: usize,
    pub area_side: f64,
    pub topology_seed: u64,
    /// Optional `{"positions": [[x, y], ...]}` file replacing the random
    /// placement; `n_nodes` must then match its length.
    pub topology_file: Option<PathBuf>,
    pub cluster_size_min: usize,
    pub cluster_size_max: usize,
    pub alphas: Vec<f64>,
    pub epsilon: f64,
    pub runs: usize,
    pub error_threshold: f64,
    pub max_iterations: usize,
    pub sim_base_seed: u64,
    pub eps_amp: f64,
    pub e_elec: f64,
    pub k_bits: u32,
    pub init_low: f64,
    pub init_high: f64,
    pub output_dir: PathBuf,
    pub optimizer_max_iters: usize,
    pub optimizer_step_scale: f64,
    pub optimizer_normalize_steps: bool,
    pub optimizer_tol: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n_nodes: 30,
            area_side: 50.0,
            topology_seed: 1,
            topology_file: None,
            cluster_size_min: 2,
            cluster_size_max: 10,
            alphas: vec![0.0],
            epsilon: 1e-2,
            runs: 1000,
            error_threshold: 0.1,
            max_iterations: 100_000,
            sim_base_seed: 0,
            eps_amp: 1.0,
            e_elec: 0.0,
            k_bits: 1,
            init_low: 0.0,
            init_high: 30.0,
            output_dir: PathBuf::from("results"),
            optimizer_max_iters: 5000,
            optimizer_step_scale: 1.0,
            optimizer_normalize_steps: false,
            optimizer_tol: 1e-6,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn energy_params(&self) -> EnergyParams {
        EnergyParams { eps_amp: self.eps_amp, e_elec: self.e_elec, k_bits: self.k_bits }
    }

    pub fn optimizer_options(&self, alpha: f64) -> OptimizerOptions {
        OptimizerOptions {
            alpha,
            epsilon: self.epsilon,
            max_iters: self.optimizer_max_iters,
            step_scale: self.optimizer_step_scale,
            normalize_steps: self.optimizer_normalize_steps,
            tol: self.optimizer_tol,
            ..OptimizerOptions::default()
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.n_nodes < 2 {
            return Err(bad("n_nodes", format!("need at least 2 nodes, got {}", self.n_nodes)));
        }
        if !(self.area_side > 0.0 && self.area_side.is_finite()) {
            return Err(bad("area_side", format!("must be positive, got {}", self.area_side)));
        }
        if self.cluster_size_min < 2 {
            return Err(bad("cluster_size_min", format!("clusters need at least 2 nodes, got {}", self.cluster_size_min)));
        }
        if self.cluster_size_max > self.n_nodes {
            return Err(bad(
                "cluster_size_max",
                format!("{} exceeds n_nodes = {}", self.cluster_size_max, self.n_nodes),
            ));
        }
        if self.cluster_size_min > self.cluster_size_max {
            return Err(bad(
                "cluster_size_min",
                format!("{} exceeds cluster_size_max = {}", self.cluster_size_min, self.cluster_size_max),
            ));
        }
        if self.alphas.is_empty() {
            return Err(bad("alphas", "at least one regularization weight is required"));
        }
        if let Some(a) = self.alphas.iter().find(|a| !(**a >= 0.0 && a.is_finite())) {
            return Err(bad("alphas", format!("every alpha must be a finite number >= 0, got {a}")));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(bad("epsilon", format!("must lie in (0, 1), got {}", self.epsilon)));
        }
        if self.runs < 1 {
            return Err(bad("runs", "must be >= 1"));
        }
        if !(self.error_threshold > 0.0 && self.error_threshold.is_finite()) {
            return Err(bad("error_threshold", format!("must be > 0, got {}", self.error_threshold)));
        }
        if self.max_iterations < 1 {
            return Err(bad("max_iterations", "must be >= 1"));
        }
        if !(self.eps_amp >= 0.0 && self.eps_amp.is_finite()) {
            return Err(bad("eps_amp", format!("must be >= 0, got {}", self.eps_amp)));
        }
        if !(self.e_elec >= 0.0 && self.e_elec.is_finite()) {
            return Err(bad("e_elec", format!("must be >= 0, got {}", self.e_elec)));
        }
        if !(self.init_low.is_finite() && self.init_high.is_finite() && self.init_low <= self.init_high) {
            return Err(bad(
                "init_low",
                format!("must be finite and <= init_high ({} > {})", self.init_low, self.init_high),
            ));
        }
        if self.init_low == 0.0 && self.init_high == 0.0 {
            return Err(bad("init_high", "an all-zero initial state makes the relative error undefined"));
        }
        if self.optimizer_max_iters < 1 {
            return Err(bad("optimizer_max_iters", "must be >= 1"));
        }
        if !(self.optimizer_step_scale > 0.0 && self.optimizer_step_scale.is_finite()) {
            return Err(bad("optimizer_step_scale", format!("must be > 0, got {}", self.optimizer_step_scale)));
        }
        if self.optimizer_tol.is_nan() || self.optimizer_tol < 0.0 {
            return Err(bad("optimizer_tol", format!("must be >= 0, got {}", self.optimizer_tol)));
        }
        Ok(())
    }
}

pub fn load_config(path: &Path) -> Result<ExperimentConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    // a relative topology file is resolved against the config's directory
    if let (Some(file), Some(dir)) = (&cfg.topology_file, path.parent()) {
        if file.is_relative() {
            cfg.topology_file = Some(dir.join(file));
        }
    }
    Ok(cfg)
}
