//! Mittag-Leffler values next to the closed forms they reduce to.

use abc_sir::special::ml;

pub fn run_example() -> Result<(), abc_sir::Error> {
    for z in [-10.0, -1.0, 0.5, 2.0] {
        println!("E_1,1({z:>5}) = {:.15e}   exp = {:.15e}", ml(1.0, 1.0, z)?, f64::exp(z));
    }
    for x in [0.5_f64, 2.0, 5.0] {
        println!(
            "E_2,1(-{:.2}) = {:.15e}   cos = {:.15e}",
            x * x,
            ml(2.0, 1.0, -x * x)?,
            x.cos()
        );
    }
    // the relaxation curve that sets the memory of the ABC derivative
    for t in [0.1, 1.0, 10.0, 100.0] {
        let alpha = 0.9;
        let gamma = alpha / (1.0 - alpha);
        let z = -gamma * f64::powf(t, alpha);
        println!(
            "alpha=0.9 t={t:>6}: E_alpha(-gamma t^alpha) = {:.6e}",
            ml(alpha, 1.0, z)?
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
