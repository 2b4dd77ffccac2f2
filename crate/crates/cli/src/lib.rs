//! Configuration, experiment driver and result serialization for the
//! `comac` command-line tool.

pub mod config;
pub mod output;
pub mod sweep;

pub use config::{load_config, ConfigError, ExperimentConfig};
pub use sweep::{run_sweep, write_outputs, SweepError, SweepResult};
