//! Runs every example's body so the examples cannot rot.

#[allow(dead_code)]
#[path = "../examples/ml_eval.rs"]
mod ml_eval;

#[test]
fn ml_eval_example_runs() {
    ml_eval::run_example().expect("ml_eval example should run");
}

#[allow(dead_code)]
#[path = "../examples/fractional_operators.rs"]
mod fractional_operators;

#[test]
fn fractional_operators_example_runs() {
    fractional_operators::run_example().expect("fractional_operators example should run");
}

#[allow(dead_code)]
#[path = "../examples/uncontrolled_spread.rs"]
mod uncontrolled_spread;

#[test]
fn uncontrolled_spread_example_runs() {
    uncontrolled_spread::run_example().expect("uncontrolled_spread example should run");
}

#[allow(dead_code)]
#[path = "../examples/optimal_vaccination.rs"]
mod optimal_vaccination;

#[test]
fn optimal_vaccination_example_runs() {
    optimal_vaccination::run_example().expect("optimal_vaccination example should run");
}

#[allow(dead_code)]
#[path = "../examples/gradient_check.rs"]
mod gradient_check;

#[test]
fn gradient_check_example_runs() {
    gradient_check::run_example().expect("gradient_check example should run");
}

#[allow(dead_code)]
#[path = "../examples/alpha_sweep.rs"]
mod alpha_sweep;

#[test]
fn alpha_sweep_example_runs() {
    alpha_sweep::run_example().expect("alpha_sweep example should run");
}
