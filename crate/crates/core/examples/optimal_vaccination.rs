//! Optimal vaccination on the default outbreak with a coarse step, writing the
//! usual artifacts to a temporary directory.

use abc_sir::optimizer::forward_backward_sweep;
use abc_sir::output::write_trajectory_artifacts;
use abc_sir::scenario::load_config;

pub fn run_example() -> Result<(), abc_sir::Error> {
    let config = load_config(r#"{"alpha": 0.95, "time": {"tau": 0.02}}"#)?;
    let problem = config.build_problem()?;
    let report = forward_backward_sweep(&problem, &config.fbs)?;

    println!("iterations: {} (converged: {})", report.iterations, report.converged);
    println!("J without vaccination: {:.4e}", report.j_history[0]);
    println!(
        "J with vaccination:    {:.4e} (infection {:.4e}, terminal {:.4e}, control {:.4e})",
        report.objective.total, report.objective.infection, report.objective.terminal, report.objective.control
    );

    let dir = std::env::temp_dir().join("abc-sir-optimal-vaccination");
    let files = write_trajectory_artifacts(
        &dir,
        &report.state,
        &report.control,
        &problem.params,
        &config.snapshot_indices(),
        true,
    )?;
    println!("wrote {} files under {}", files.len(), dir.display());
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
