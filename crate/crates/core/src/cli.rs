//! Command-line front end shared by the `abc-sir` binary and the tests.

use crate::error::{Error, Result};
use crate::forward::{solve_forward, ControlTrajectory};
use crate::optimizer::{evaluate_objective, forward_backward_sweep, gradient_check};
use crate::output::{write_summary, write_trajectory_artifacts, RunSummary};
use crate::scenario::{load_config, ScenarioConfig};
use crate::special::ml;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::time::Instant;

/// Order used when the command line asks for the integer-order limit.
pub const ALPHA_NEAR_ONE: f64 = 0.999;

#[derive(Debug, Parser)]
#[command(
    name = "abc-sir",
    version,
    about = "Fractional SIR simulation and optimal vaccination"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the epidemic under a fixed vaccination rate.
    Simulate(SimulateArgs),
    /// Compute the optimal vaccination policy by forward-backward sweeps.
    Optimize(ScenarioArgs),
    /// Evaluate the two-parameter Mittag-Leffler function.
    MlEval(MlArgs),
    /// Compare adjoint and finite-difference derivatives of the cost.
    GradientCheck(GradientArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Scenario file (JSON); the default outbreak when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Fractional order; 1 is mapped to 0.999.
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Output directory, overriding the scenario file.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Constant vaccination rate in [0, 1].
    #[arg(long, default_value_t = 0.0)]
    pub control: f64,
}

#[derive(Debug, Args)]
pub struct MlArgs {
    #[arg(long)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    pub xi: f64,
    #[arg(long, allow_hyphen_values = true)]
    pub z: f64,
}

#[derive(Debug, Args)]
pub struct GradientArgs {
    /// Scenario file (JSON); keep it small, every direction costs two solves.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long, default_value_t = 5)]
    pub directions: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Constant base control, kept away from the bounds.
    #[arg(long, default_value_t = 0.5)]
    pub control: f64,
    /// Largest accepted relative error.
    #[arg(long, default_value_t = 0.05)]
    pub tolerance: f64,
}

/// Reads the scenario and applies the command-line overrides. Returns the
/// config and the requested order when it was mapped.
pub fn resolve_config(
    path: Option<&Path>,
    alpha: Option<f64>,
    output: Option<&Path>,
) -> Result<(ScenarioConfig, Option<f64>)> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?,
        None => "{}".to_string(),
    };
    let mut config = load_config(&text)?;
    let mut requested = None;
    if let Some(a) = alpha {
        if a == 1.0 {
            config.alpha = ALPHA_NEAR_ONE;
            requested = Some(a);
        } else {
            config.alpha = a;
        }
    }
    if let Some(dir) = output {
        config.outputs.directory = dir.to_string_lossy().into_owned();
    }
    config.validate()?;
    Ok((config, requested))
}

/// Runs one command and returns the document printed on stdout.
pub fn run(cli: Cli) -> Result<Value> {
    match cli.command {
        Command::Simulate(args) => simulate(args),
        Command::Optimize(args) => optimize(args),
        Command::MlEval(args) => Ok(json!({
            "alpha": args.alpha,
            "xi": args.xi,
            "z": args.z,
            "value": ml(args.alpha, args.xi, args.z)?,
        })),
        Command::GradientCheck(args) => gradient(args),
    }
}

/// Machine-readable error document for stderr.
pub fn error_document(e: &Error) -> Value {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } })
}

fn finish(mut summary: RunSummary, started: Instant, dir: &Path, result: Result<()>) -> Result<Value> {
    if let Err(e) = &result {
        summary.record_error(e);
    }
    summary.wall_clock_seconds = started.elapsed().as_secs_f64();
    let path = write_summary(dir, &summary)?;
    result?;
    Ok(json!({
        "status": summary.status,
        "summary": path.to_string_lossy(),
        "objective": summary.objective,
        "iterations": summary.iterations,
        "converged": summary.converged,
    }))
}

fn simulate(args: SimulateArgs) -> Result<Value> {
    let started = Instant::now();
    let s = &args.scenario;
    let (config, requested) = resolve_config(s.config.as_deref(), s.alpha, s.output.as_deref())?;
    let dir = PathBuf::from(&config.outputs.directory);
    let mut summary = RunSummary::new("simulate", &config, requested);
    let result = (|| {
        let problem = config.build_problem()?;
        let u = ControlTrajectory::constant(problem.grid, problem.n_steps(), args.control)?;
        let traj = solve_forward(&problem, &u)?;
        let objective = evaluate_objective(&traj, &u, &problem.params)?;
        summary.objective = Some(objective);
        summary.record_final_state(&traj);
        write_trajectory_artifacts(
            &dir,
            &traj,
            &u,
            &problem.params,
            &config.snapshot_indices(),
            args.control > 0.0,
        )?;
        Ok(())
    })();
    finish(summary, started, &dir, result)
}

fn optimize(args: ScenarioArgs) -> Result<Value> {
    let started = Instant::now();
    let (config, requested) = resolve_config(args.config.as_deref(), args.alpha, args.output.as_deref())?;
    let dir = PathBuf::from(&config.outputs.directory);
    let mut summary = RunSummary::new("optimize", &config, requested);
    let result = (|| {
        let problem = config.build_problem()?;
        if !config.control_enabled {
            let u = ControlTrajectory::zeros(problem.grid, problem.n_steps());
            let traj = solve_forward(&problem, &u)?;
            let objective = evaluate_objective(&traj, &u, &problem.params)?;
            summary.objective = Some(objective);
            summary.j_uncontrolled = Some(objective.total);
            summary.converged = Some(true);
            summary.record_final_state(&traj);
            write_trajectory_artifacts(&dir, &traj, &u, &problem.params, &config.snapshot_indices(), false)?;
            return Ok(());
        }
        let report = forward_backward_sweep(&problem, &config.fbs)?;
        summary.objective = Some(report.objective);
        // the sweep starts from u ≡ 0, so its first cost is the uncontrolled one
        summary.j_uncontrolled = report.j_history.first().copied();
        summary.iterations = report.iterations;
        summary.converged = Some(report.converged);
        summary.j_history = report.j_history.clone();
        summary.clipped_mass = report.clipped_mass;
        if !report.converged {
            summary.status = "not_converged".into();
        }
        summary.record_final_state(&report.state);
        write_trajectory_artifacts(
            &dir,
            &report.state,
            &report.control,
            &problem.params,
            &config.snapshot_indices(),
            true,
        )?;
        Ok(())
    })();
    finish(summary, started, &dir, result)
}

fn gradient(args: GradientArgs) -> Result<Value> {
    let (config, requested) = resolve_config(args.config.as_deref(), args.alpha, None)?;
    let problem = config.build_problem()?;
    if !(args.control - args.epsilon > 0.0 && args.control + args.epsilon < 1.0) {
        return Err(Error::Domain(format!(
            "base control {} must stay inside (0, 1) after a shift of {}",
            args.control, args.epsilon
        )));
    }
    let u = ControlTrajectory::constant(problem.grid, problem.n_steps(), args.control)?;
    let checks = gradient_check(&problem, &u, args.directions, args.epsilon, args.seed)?;
    let worst = checks.iter().map(|c| c.relative_error()).fold(0.0, f64::max);
    let doc = json!({
        "alpha": config.alpha,
        "alpha_requested": requested,
        "directions": checks,
        "max_relative_error": worst,
        "tolerance": args.tolerance,
        "passed": worst <= args.tolerance,
    });
    if worst > args.tolerance {
        return Err(Error::Accuracy(format!(
            "gradient check failed: worst relative error {worst:.3e} exceeds {}; {doc}",
            args.tolerance
        )));
    }
    Ok(doc)
}
