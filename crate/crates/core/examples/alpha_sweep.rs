//! How the fractional order shapes the uncontrolled epidemic.
//!
//! Lower orders react faster at first and then relax more slowly.

use abc_sir::forward::{solve_forward, ControlTrajectory};
use abc_sir::optimizer::evaluate_objective;
use abc_sir::output::far_corner_infection;
use abc_sir::scenario::load_config;

pub fn run_example() -> Result<(), abc_sir::Error> {
    println!("alpha   J0          far corner I at t=1   at t=20");
    for alpha in [0.5, 0.7, 0.9, 0.95, 0.999] {
        let config = load_config(&format!(r#"{{"alpha": {alpha}, "time": {{"tau": 0.005}}}}"#))?;
        let problem = config.build_problem()?;
        let u = ControlTrajectory::zeros(problem.grid, problem.n_steps());
        let traj = solve_forward(&problem, &u)?;
        let j0 = evaluate_objective(&traj, &u, &problem.params)?.total;
        let one_day = (1.0 / config.time.tau).round() as usize;
        println!(
            "{alpha:<6}  {j0:.4e}  {:>8.2}              {:>8.2}",
            far_corner_infection(&traj, one_day),
            far_corner_infection(&traj, problem.n_steps())
        );
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
