use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use comac_cli::sweep::{build_pool, build_topology};
use comac_cli::{load_config, run_sweep, write_outputs, ExperimentConfig};
use comac_core::CandidatePool;

#[derive(Parser)]
#[command(name = "comac", version, about = "Energy-regularized clustered average consensus")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimize and simulate every alpha in the config, writing CSV traces and summary.json.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Overrides `output_dir`.
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Overrides `sim_base_seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Parse and check a config without running anything.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
    /// Print the candidate clusters that survive pruning.
    Candidates {
        #[arg(long)]
        config: PathBuf,
    },
}

fn load(path: &Path) -> Result<ExperimentConfig, ExitCode> {
    load_config(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(1)
    })
}

fn print_pool(pool: &CandidatePool) -> io::Result<()> {
    let mut out = io::stdout().lock();
    writeln!(out, "# {} enumerated, {} after pruning", pool.enumerated, pool.len())?;
    writeln!(out, "index\thead\tsize\tcost_l1\tmembers")?;
    for (i, (c, cost)) in pool.candidates.iter().zip(&pool.costs).enumerate() {
        writeln!(out, "{i}\t{}\t{}\t{cost}\t{:?}", c.head(), c.size(), c.members())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Validate { config } => match load(&config) {
            Ok(_) => {
                println!("{}: ok", config.display());
                ExitCode::SUCCESS
            }
            Err(code) => code,
        },
        Command::Candidates { config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let pool = match build_topology(&cfg).and_then(|t| build_pool(&cfg, &t)) {
                Ok(p) => p,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            };
            // a closed pipe (e.g. `| head`) just ends the listing
            let _ = print_pool(&pool);
            ExitCode::SUCCESS
        }
        Command::Run { config, output_dir, seed } => {
            let mut cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            if let Some(dir) = output_dir {
                cfg.output_dir = dir;
            }
            if let Some(seed) = seed {
                cfg.sim_base_seed = seed;
            }
            let result = match run_sweep(&cfg).and_then(|r| write_outputs(&r, &cfg.output_dir).map(|_| r)) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(e.exit_code() as u8);
                }
            };
            for s in result.summaries() {
                match s.mean_energy_at_threshold {
                    Some(energy) => println!(
                        "alpha={}: xi={:.6} cost={:.3} iterations={:.2} energy={:.3}",
                        s.alpha,
                        s.xi,
                        s.expected_cost_l1,
                        s.mean_iterations_to_threshold.unwrap_or(f64::NAN),
                        energy
                    ),
                    None => println!("alpha={}: infeasible (best xi={:.6})", s.alpha, s.xi),
                }
            }
            ExitCode::from(result.exit_code() as u8)
        }
    }
}
