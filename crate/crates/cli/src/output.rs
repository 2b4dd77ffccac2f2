//! Result files: one CSV trace per alpha plus a JSON summary.
//!
//! Floats are written in Rust's shortest round-trip decimal form, so two runs
//! with the same configuration produce byte-identical files.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use comac_core::AveragedTrace;
use serde::Serialize;

pub const CSV_HEADER: &str = "alpha,iteration,mean_error,mean_energy";
pub const SUMMARY_FILE: &str = "summary.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportEntry {
    pub head: usize,
    pub members: Vec<usize>,
    pub probability: f64,
}

/// One summary row. For an infeasible alpha `xi` is the best value found,
/// the support is empty and the simulation fields are null.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaSummary {
    pub alpha: f64,
    pub feasible: bool,
    pub xi: f64,
    pub objective: f64,
    pub expected_cost_l1: f64,
    pub support: Vec<SupportEntry>,
    pub mean_iterations_to_threshold: Option<f64>,
    pub mean_energy_at_threshold: Option<f64>,
}

pub fn trace_file_name(alpha: f64) -> String {
    format!("trace_alpha={alpha}.csv")
}

pub fn trace_path(dir: &Path, alpha: f64) -> PathBuf {
    dir.join(trace_file_name(alpha))
}

pub fn render_trace_csv(trace: &AveragedTrace, alpha: f64) -> String {
    let mut out = String::with_capacity(32 * (trace.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (t, (err, energy)) in trace.mean_error.iter().zip(&trace.mean_energy).enumerate() {
        writeln!(out, "{alpha},{t},{err},{energy}").expect("writing to a String");
    }
    out
}

pub fn write_trace_csv(trace: &AveragedTrace, alpha: f64, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_trace_csv(trace, alpha))
}

pub fn render_summary_json(results: &[AlphaSummary]) -> String {
    let mut s = serde_json::to_string_pretty(results).expect("summary values are finite");
    s.push('\n');
    s
}

pub fn write_summary_json(results: &[AlphaSummary], path: &Path) -> std::io::Result<()> {
    std::fs::write(path, render_summary_json(results))
}
