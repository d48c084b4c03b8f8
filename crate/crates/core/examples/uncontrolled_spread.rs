//! The default outbreak without vaccination, with heatmaps of the infected.

use abc_sir::forward::{solve_forward, ControlTrajectory};
use abc_sir::output::{far_corner_infection, render_heatmap};
use abc_sir::scenario::load_config;

pub fn run_example() -> Result<(), abc_sir::Error> {
    let config = load_config(r#"{"alpha": 0.9, "time": {"tau": 0.02}}"#)?;
    let problem = config.build_problem()?;
    let u = ControlTrajectory::zeros(problem.grid, problem.n_steps());
    let traj = solve_forward(&problem, &u)?;

    for n in config.snapshot_indices() {
        let total_i: f64 = traj.i(n).iter().sum::<f64>() * problem.grid.cell_area();
        println!(
            "t={:>5.1}  total I={total_i:>9.2}  far corner I={:>6.2}",
            traj.time(n),
            far_corner_infection(&traj, n)
        );
    }
    // drawn on the scale of the initial susceptible density
    print!("{}", render_heatmap(&traj.final_state().i, 0.0, 50.0)?);
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
