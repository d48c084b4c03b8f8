//! Adjoint directional derivatives against central differences on a small grid.

use abc_sir::forward::ControlTrajectory;
use abc_sir::optimizer::gradient_check;
use abc_sir::scenario::load_config;

pub fn run_example() -> Result<(), abc_sir::Error> {
    let config = load_config(
        r#"{"alpha": 0.9, "grid": {"nx": 4, "ny": 4}, "time": {"t_final": 1, "tau": 0.02}, "outputs": {"snapshot_times": [1]}}"#,
    )?;
    let problem = config.build_problem()?;
    let u = ControlTrajectory::constant(problem.grid, problem.n_steps(), 0.5)?;
    for (k, c) in gradient_check(&problem, &u, 5, 1e-4, 7)?.iter().enumerate() {
        println!(
            "direction {k}: adjoint {:+.10e}  finite difference {:+.10e}  relative error {:.2e}",
            c.adjoint,
            c.finite_difference,
            c.relative_error()
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
