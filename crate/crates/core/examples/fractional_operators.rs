//! The discrete ABC derivative, its backward twin and the AB integral on a
//! smooth path.

use abc_sir::fractional::{
    ab_integral, abc_derivative_apply, backward_abc_derivative_apply, duality_residual, FractionalSetup,
};

pub fn run_example() -> Result<(), abc_sir::Error> {
    let setup = FractionalSetup::new(0.8, 0.01, 200)?;
    let y: Vec<f64> = (0..=200).map(|k| (setup.time(k)).sin()).collect();

    let d = abc_derivative_apply(&y, &setup)?;
    let back = backward_abc_derivative_apply(&y, &setup)?;
    let integral = ab_integral(&d, &setup)?;
    println!("alpha = {}, B(alpha) = {:.6}", setup.alpha, setup.b_alpha);
    for k in [0, 50, 100, 200] {
        println!(
            "t={:.2}  y={:+.5}  D y={:+.5}  backward D y={:+.5}  I[D y] + y(0)={:+.5}",
            setup.time(k),
            y[k],
            d[k],
            back[k],
            integral[k] + y[0]
        );
    }

    // the duality gap shrinks as the step is refined
    for n in [100, 200, 400] {
        let s = FractionalSetup::new(0.7, 1.0 / n as f64, n)?;
        let y: Vec<f64> = (0..=n).map(|k| s.time(k).sin()).collect();
        let v: Vec<f64> = (0..=n).map(|k| s.time(k).cos()).collect();
        println!("n={n:>4}: duality residual {:.3e}", duality_residual(&y, &v, &s)?);
    }
    Ok(())
}

fn main() {
    if let Err(e) = run_example() {
        eprintln!("{e}");
        std::process::exit(1);
    }
}
