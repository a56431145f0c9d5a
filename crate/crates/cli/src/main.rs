//! `uavsp` — plan grid trajectories that maximize the probability of sensing
//! a randomly located target under expected-SNR and distance constraints.
//!
//! Exit codes: 0 success, 2 usage, 3 validation, 4 infeasible instance,
//! 5 internal error.

mod commands;
mod manifest;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

use commands::{default_manifest_path, dispatch, run_replay, CliError};
use manifest::CommandSpec;
use uavsp_core::scenario::load_scenario_path;

#[derive(Parser)]
#[command(name = "uavsp", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the expected SNR map, the truncated target map, and the
    /// blocked-cell mask from a scenario.
    GenMaps {
        /// Scenario file (defaults below are relative to --out-dir).
        #[arg(long)]
        scenario: PathBuf,
        /// Output directory for default file names.
        #[arg(long, default_value = ".")]
        out_dir: PathBuf,
        /// Expected SNR map CSV (dB values).
        #[arg(long)]
        snr_out: Option<PathBuf>,
        /// Target location distribution map CSV (probabilities).
        #[arg(long)]
        target_out: Option<PathBuf>,
        /// Blocked-cell mask CSV (0/1).
        #[arg(long)]
        mask_out: Option<PathBuf>,
        /// Manifest path (default: <out-dir>/manifest.toml).
        #[arg(long)]
        manifest_out: Option<PathBuf>,
    },
    /// Plan one trajectory with the selected solver.
    Plan {
        #[arg(long)]
        scenario: PathBuf,
        /// benchmark | sol1 | sol2 | sol3
        #[arg(long)]
        solver: String,
        /// Initial trajectory for sol2/sol3: sol1 | benchmark.
        #[arg(long, default_value = "sol1")]
        initial: String,
        /// Distance budget override in meters (default: scenario budget).
        #[arg(long)]
        dbar: Option<f64>,
        /// Candidate cells for the single-detour improvement.
        #[arg(long, default_value_t = 10)]
        ri: usize,
        /// Extra waypoints for the multi-waypoint improvement.
        #[arg(long, default_value_t = 10)]
        rii: usize,
        /// Master seed (default: scenario rng_seed).
        #[arg(long)]
        seed: Option<u64>,
        /// Trajectory report path.
        #[arg(long, default_value = "plan.toml")]
        out: PathBuf,
        #[arg(long)]
        manifest_out: Option<PathBuf>,
    },
    /// Run the solver set over a list of distance budgets and export CSV.
    Sweep {
        #[arg(long)]
        scenario: PathBuf,
        /// Comma-separated budgets in meters, e.g. "900,1800,2700".
        #[arg(long, value_delimiter = ',', required = true)]
        dbar_list: Vec<f64>,
        /// Comma-separated solver set.
        #[arg(long, value_delimiter = ',', default_value = "benchmark,sol1,sol2,sol3")]
        solvers: Vec<String>,
        #[arg(long, default_value_t = 10)]
        ri: usize,
        #[arg(long, default_value_t = 10)]
        rii: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Sweep CSV path.
        #[arg(long, default_value = "sweep.csv")]
        out: PathBuf,
        #[arg(long)]
        manifest_out: Option<PathBuf>,
    },
    /// Check a trajectory file against a scenario and Monte Carlo the
    /// analytic sensing probability.
    Validate {
        #[arg(long)]
        scenario: PathBuf,
        /// Trajectory report to validate.
        #[arg(long)]
        trajectory: PathBuf,
        /// Monte Carlo sample count.
        #[arg(short, long)]
        n: usize,
        #[arg(long)]
        seed: Option<u64>,
        /// Budget override in meters for the feasibility check.
        #[arg(long)]
        dbar: Option<f64>,
        /// Validation report path.
        #[arg(long, default_value = "validate.toml")]
        out: PathBuf,
        #[arg(long)]
        manifest_out: Option<PathBuf>,
    },
    /// Re-execute a recorded manifest; outputs land at the recorded paths.
    Replay {
        #[arg(long)]
        manifest: PathBuf,
    },
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn path_str(p: &std::path::Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Relative scenario paths that do not exist locally are looked up under
/// `$UAVSP_SCENARIO_DIR`.
fn resolve_scenario(p: PathBuf) -> PathBuf {
    if p.is_relative() && !p.exists() {
        if let Ok(dir) = std::env::var("UAVSP_SCENARIO_DIR") {
            let alt = std::path::Path::new(&dir).join(&p);
            if alt.exists() {
                return alt;
            }
        }
    }
    p
}

/// Scenario-derived defaults for --dbar and --seed.
fn scenario_defaults(scenario: &std::path::Path) -> Result<(f64, u64), CliError> {
    let config = load_scenario_path(scenario).map_err(|e| CliError::Validation(e.to_string()))?;
    Ok((config.distance_budget_m(), config.rng_seed))
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::GenMaps {
            scenario,
            out_dir,
            snr_out,
            target_out,
            mask_out,
            manifest_out,
        } => {
            let scenario = resolve_scenario(scenario);
            let spec = CommandSpec::GenMaps {
                scenario: path_str(&scenario),
                snr_out: path_str(&snr_out.unwrap_or_else(|| out_dir.join("snr_db.csv"))),
                target_out: path_str(
                    &target_out.unwrap_or_else(|| out_dir.join("target_prob.csv")),
                ),
                mask_out: path_str(&mask_out.unwrap_or_else(|| out_dir.join("blocked_mask.csv"))),
            };
            let manifest = manifest_out.unwrap_or_else(|| out_dir.join("manifest.toml"));
            dispatch(&spec, Some(&manifest))
        }
        Command::Plan {
            scenario,
            solver,
            initial,
            dbar,
            ri,
            rii,
            seed,
            out,
            manifest_out,
        } => {
            let scenario = resolve_scenario(scenario);
            let (default_dbar, default_seed) = scenario_defaults(&scenario)?;
            let spec = CommandSpec::Plan {
                scenario: path_str(&scenario),
                solver,
                initial,
                dbar_m: dbar.unwrap_or(default_dbar),
                ri,
                rii,
                seed: seed.unwrap_or(default_seed),
                out: path_str(&out),
            };
            let manifest = manifest_out.unwrap_or_else(|| default_manifest_path(&path_str(&out)));
            dispatch(&spec, Some(&manifest))
        }
        Command::Sweep {
            scenario,
            dbar_list,
            solvers,
            ri,
            rii,
            seed,
            out,
            manifest_out,
        } => {
            let scenario = resolve_scenario(scenario);
            let (_, default_seed) = scenario_defaults(&scenario)?;
            let spec = CommandSpec::Sweep {
                scenario: path_str(&scenario),
                dbar_list,
                solvers,
                ri,
                rii,
                seed: seed.unwrap_or(default_seed),
                out: path_str(&out),
            };
            let manifest = manifest_out.unwrap_or_else(|| default_manifest_path(&path_str(&out)));
            dispatch(&spec, Some(&manifest))
        }
        Command::Validate {
            scenario,
            trajectory,
            n,
            seed,
            dbar,
            out,
            manifest_out,
        } => {
            let scenario = resolve_scenario(scenario);
            let (default_dbar, default_seed) = scenario_defaults(&scenario)?;
            let spec = CommandSpec::Validate {
                scenario: path_str(&scenario),
                trajectory: path_str(&trajectory),
                n_samples: n,
                seed: seed.unwrap_or(default_seed),
                dbar_m: dbar.unwrap_or(default_dbar),
                out: path_str(&out),
            };
            let manifest = manifest_out.unwrap_or_else(|| default_manifest_path(&path_str(&out)));
            dispatch(&spec, Some(&manifest))
        }
        Command::Replay { manifest } => run_replay(&manifest),
    }
}
