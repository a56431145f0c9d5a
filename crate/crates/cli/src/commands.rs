//! Command implementations shared by the CLI entry point and `replay`.

use std::path::{Path, PathBuf};

use uavsp_core::eval::{monte_carlo_validate, sweep, verify_constraints, SweepParams};
use uavsp_core::graph::{PlanGraph, TrajectoryDoc};
use uavsp_core::radio::build_snr_map;
use uavsp_core::scenario::{load_scenario_path, ScenarioConfig};
use uavsp_core::seed::derive_seed;
use uavsp_core::solvers::{
    benchmark_shortest, improve_multi_waypoint, improve_single_detour, solve_lagrangian,
    AcoParams, InitialTag, LagrangianParams, SolverError, SolverTag,
};
use uavsp_core::targetmap::{build_target_map, obstacle_mask};
use uavsp_core::TargetMap;

use crate::manifest::{CommandSpec, RunManifest};

/// Failure category; each maps to a distinct exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Validation(String),
    Infeasible(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Infeasible(_) => 4,
            CliError::Internal(_) => 5,
        }
    }

    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m)
            | CliError::Validation(m)
            | CliError::Infeasible(m)
            | CliError::Internal(m) => m,
        }
    }
}

impl From<SolverError> for CliError {
    fn from(e: SolverError) -> Self {
        CliError::Infeasible(e.to_string())
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            std::fs::create_dir_all(dir)
                .map_err(|e| CliError::Internal(format!("mkdir {}: {e}", dir.display())))?;
        }
    }
    std::fs::write(path, contents)
        .map_err(|e| CliError::Internal(format!("write {}: {e}", path.display())))
}

fn load_config(path: &str) -> Result<ScenarioConfig, CliError> {
    load_scenario_path(Path::new(path)).map_err(|e| CliError::Validation(e.to_string()))
}

/// Scenario → SNR map, truncated target map, and plan graph.
fn build_instance(config: &ScenarioConfig) -> Result<(TargetMap, PlanGraph), CliError> {
    let snr = build_snr_map(config).map_err(|e| CliError::Validation(e.to_string()))?;
    let blocked = obstacle_mask(&config.grid, &config.obstacles);
    let target =
        build_target_map(config, &blocked).map_err(|e| CliError::Validation(e.to_string()))?;
    let graph = PlanGraph::build(
        &snr,
        &target,
        config.snr_threshold_db,
        &config.grid,
        config.start,
        config.finish,
    )
    .map_err(|e| match e {
        uavsp_core::graph::GraphError::InfeasibleEndpoint { .. } => {
            CliError::Infeasible(e.to_string())
        }
        other => CliError::Validation(other.to_string()),
    })?;
    Ok((target, graph))
}

fn write_manifest(spec: CommandSpec, path: &Path) -> Result<(), CliError> {
    write_file(path, &RunManifest::new(spec).to_toml())
}

pub fn run_gen_maps(spec: &CommandSpec, manifest_out: Option<&Path>) -> Result<(), CliError> {
    let CommandSpec::GenMaps {
        scenario,
        snr_out,
        target_out,
        mask_out,
    } = spec
    else {
        unreachable!("gen-maps spec");
    };
    let config = load_config(scenario)?;
    let snr = build_snr_map(&config).map_err(|e| CliError::Validation(e.to_string()))?;
    let blocked = obstacle_mask(&config.grid, &config.obstacles);
    let target =
        build_target_map(&config, &blocked).map_err(|e| CliError::Validation(e.to_string()))?;

    write_file(Path::new(snr_out), &snr.to_csv_db())?;
    write_file(Path::new(target_out), &target.to_csv())?;
    let d = config.grid.dimension();
    let mut mask_csv = String::new();
    for i in 0..d {
        for j in 0..d {
            if j > 0 {
                mask_csv.push(',');
            }
            mask_csv.push(if blocked[i * d + j] { '1' } else { '0' });
        }
        mask_csv.push('\n');
    }
    write_file(Path::new(mask_out), &mask_csv)?;

    if let Some(p) = manifest_out {
        write_manifest(spec.clone(), p)?;
    }
    eprintln!(
        "gen-maps: wrote {snr_out}, {target_out}, {mask_out} (D = {d}, {} cells blocked)",
        blocked.iter().filter(|b| **b).count()
    );
    Ok(())
}

pub fn run_plan(spec: &CommandSpec, manifest_out: Option<&Path>) -> Result<(), CliError> {
    let CommandSpec::Plan {
        scenario,
        solver,
        initial,
        dbar_m,
        ri,
        rii,
        seed,
        out,
    } = spec
    else {
        unreachable!("plan spec");
    };
    let solver_tag: SolverTag = solver.parse().map_err(CliError::Usage)?;
    let initial_tag: InitialTag = initial.parse().map_err(CliError::Usage)?;
    let config = load_config(scenario)?;
    let (_, graph) = build_instance(&config)?;
    let dbar = *dbar_m;

    let lagrangian = LagrangianParams::default();
    let make_initial = |tag: InitialTag| -> Result<_, SolverError> {
        match tag {
            InitialTag::Benchmark => benchmark_shortest(&graph, dbar),
            InitialTag::Sol1 => solve_lagrangian(&graph, dbar, &lagrangian),
        }
    };

    let report = match solver_tag {
        SolverTag::Benchmark => benchmark_shortest(&graph, dbar)?,
        SolverTag::Sol1 => solve_lagrangian(&graph, dbar, &lagrangian)?,
        SolverTag::Sol2 => {
            let init = make_initial(initial_tag)?;
            improve_single_detour(&graph, &init.trajectory, *ri, dbar)
        }
        SolverTag::Sol3 => {
            let init = make_initial(initial_tag)?;
            let aco = AcoParams {
                rng_seed: derive_seed(*seed, "plan/aco"),
                ..AcoParams::default()
            };
            improve_multi_waypoint(&graph, &init.trajectory, *rii, dbar, &aco)
        }
    };
    verify_constraints(&report.trajectory, &graph, dbar)
        .map_err(|e| CliError::Internal(format!("solver output violates constraints: {e}")))?;

    let doc = TrajectoryDoc::from_trajectory(
        &report.trajectory,
        Some(solver_tag.to_string()),
        Some(*seed),
        report.dual_bound,
    );
    write_file(Path::new(out), &doc.to_toml())?;
    if let Some(p) = manifest_out {
        write_manifest(spec.clone(), p)?;
    }
    eprintln!(
        "plan: {solver_tag} total_prob {:.6} f_d {:.1} m (budget {dbar} m) in {:.3} s -> {out}",
        report.trajectory.total_prob(),
        report.trajectory.f_d(),
        report.wallclock_s
    );
    Ok(())
}

pub fn run_sweep(spec: &CommandSpec, manifest_out: Option<&Path>) -> Result<(), CliError> {
    let CommandSpec::Sweep {
        scenario,
        dbar_list,
        solvers,
        ri,
        rii,
        seed,
        out,
    } = spec
    else {
        unreachable!("sweep spec");
    };
    if solvers.is_empty() {
        return Err(CliError::Usage("empty solver list".into()));
    }
    if dbar_list.is_empty() {
        return Err(CliError::Usage("empty budget list".into()));
    }
    let mut tags = Vec::new();
    for s in solvers {
        tags.push(s.parse::<SolverTag>().map_err(CliError::Usage)?);
    }
    let config = load_config(scenario)?;
    let (_, graph) = build_instance(&config)?;
    let params = SweepParams {
        solvers: tags,
        r_i: *ri,
        r_ii: *rii,
        seed: *seed,
        ..SweepParams::default()
    };
    let result = sweep(&graph, dbar_list, &params)?;
    write_file(Path::new(out), &result.to_csv())?;
    if let Some(p) = manifest_out {
        write_manifest(spec.clone(), p)?;
    }
    eprintln!(
        "sweep: {} rows over {} budgets in {:.3} s -> {out}",
        result.rows.len(),
        dbar_list.len(),
        result.total_wallclock_s()
    );
    Ok(())
}

pub fn run_validate(spec: &CommandSpec, manifest_out: Option<&Path>) -> Result<(), CliError> {
    let CommandSpec::Validate {
        scenario,
        trajectory,
        n_samples,
        seed,
        dbar_m,
        out,
    } = spec
    else {
        unreachable!("validate spec");
    };
    if *n_samples == 0 {
        return Err(CliError::Usage("need at least one sample (-n)".into()));
    }
    let config = load_config(scenario)?;
    let (_, graph) = build_instance(&config)?;
    let text = std::fs::read_to_string(trajectory)
        .map_err(|e| CliError::Validation(format!("cannot read {trajectory}: {e}")))?;
    let doc = TrajectoryDoc::from_toml(&text).map_err(|e| CliError::Validation(e.to_string()))?;
    let t = doc
        .to_trajectory(&graph)
        .map_err(|e| CliError::Validation(e.to_string()))?;
    verify_constraints(&t, &graph, *dbar_m).map_err(|e| CliError::Validation(e.to_string()))?;

    let mc = monte_carlo_validate(&t, &config, *n_samples, derive_seed(*seed, "validate/mc"))
        .map_err(|e| CliError::Validation(e.to_string()))?;

    let report = format!(
        "analytic = {}\nempirical = {}\nci_low = {}\nci_high = {}\nn_samples = {}\nanalytic_inside_ci = {}\n",
        mc.analytic, mc.empirical, mc.ci_low, mc.ci_high, mc.n_samples, mc.analytic_inside_ci()
    );
    write_file(Path::new(out), &report)?;
    if let Some(p) = manifest_out {
        write_manifest(spec.clone(), p)?;
    }
    eprintln!(
        "validate: analytic {:.6} vs empirical {:.6}, 99% CI [{:.6}, {:.6}] -> {}",
        mc.analytic,
        mc.empirical,
        mc.ci_low,
        mc.ci_high,
        if mc.analytic_inside_ci() {
            "analytic inside CI"
        } else {
            "analytic OUTSIDE CI"
        }
    );
    Ok(())
}

/// Re-executes the command recorded in a manifest. Outputs land at the
/// recorded paths; the manifest itself is not rewritten.
pub fn run_replay(manifest_path: &Path) -> Result<(), CliError> {
    let manifest = RunManifest::load(manifest_path).map_err(CliError::Validation)?;
    dispatch(&manifest.command, None)
}

pub fn dispatch(spec: &CommandSpec, manifest_out: Option<&Path>) -> Result<(), CliError> {
    match spec {
        CommandSpec::GenMaps { .. } => run_gen_maps(spec, manifest_out),
        CommandSpec::Plan { .. } => run_plan(spec, manifest_out),
        CommandSpec::Sweep { .. } => run_sweep(spec, manifest_out),
        CommandSpec::Validate { .. } => run_validate(spec, manifest_out),
    }
}

/// Default manifest path: alongside the primary output.
pub fn default_manifest_path(primary_out: &str) -> PathBuf {
    PathBuf::from(format!("{primary_out}.manifest.toml"))
}
