//! Discrete Atangana-Baleanu-Caputo (ABC) operators on a uniform time grid.
//!
//! The sample path is reconstructed piecewise-linearly and the Mittag-Leffler
//! kernel is integrated exactly over every interval through
//! `∫_0^x E_α(−γ s^α) ds = x E_{α,2}(−γ x^α) =: φ(x)`. On a uniform grid the
//! weight of interval `[t_k, t_{k+1}]` seen from `t_n` depends only on `n − k`:
//!
//! `w[n][k] = φ((n−k)τ) − φ((n−k−1)τ) =: W(n − k)`.
//!
//! With this choice the discrete derivative is exact on piecewise-linear input,
//! so every remaining error comes from the reconstruction.

use crate::error::{Error, Result};
use crate::special::{gamma_pos, ml};

/// Order, derived constants, time grid and memory weights of the ABC operator.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalSetup {
    pub alpha: f64,
    /// `α / (1 − α)`.
    pub gamma: f64,
    /// Normalisation `B(α) = (1 − α) + α / Γ(α)`.
    pub b_alpha: f64,
    /// Time step (days).
    pub tau: f64,
    pub n_steps: usize,
    /// `W(j)` for `j = 0..=n_steps`; `W(0) = 0`.
    increments: Vec<f64>,
}

/// Builds the memory-weight table for order `alpha` on `n_steps` intervals of width `tau`.
pub fn kernel_weights(alpha: f64, tau: f64, n_steps: usize) -> Result<FractionalSetup> {
    FractionalSetup::new(alpha, tau, n_steps)
}

impl FractionalSetup {
    pub fn new(alpha: f64, tau: f64, n_steps: usize) -> Result<Self> {
        if !(alpha > 0.0 && alpha < 1.0) {
            return Err(Error::Domain(format!(
                "fractional order must lie in (0, 1), got {alpha}"
            )));
        }
        if !(tau.is_finite() && tau > 0.0) {
            return Err(Error::Domain(format!("time step must be positive, got {tau}")));
        }
        if n_steps == 0 {
            return Err(Error::Domain("need at least one time step".into()));
        }
        let gamma = alpha / (1.0 - alpha);
        let b_alpha = b_alpha(alpha);
        let mut increments = Vec::with_capacity(n_steps + 1);
        increments.push(0.0);
        let mut prev = 0.0;
        for j in 1..=n_steps {
            let x = j as f64 * tau;
            let cur = x * ml(alpha, 2.0, -gamma * x.powf(alpha))?;
            increments.push(cur - prev);
            prev = cur;
        }
        Ok(FractionalSetup {
            alpha,
            gamma,
            b_alpha,
            tau,
            n_steps,
            increments,
        })
    }

    /// `w[n][k]`, the kernel mass of interval `k` seen from time index `n > k`.
    #[inline]
    pub fn weight(&self, n: usize, k: usize) -> f64 {
        debug_assert!(k < n && n <= self.n_steps);
        self.increments[n - k]
    }

    /// `W(j)` for lag `j ≥ 1`.
    #[inline]
    pub fn lag_weight(&self, j: usize) -> f64 {
        self.increments[j]
    }

    pub fn lag_weights(&self) -> &[f64] {
        &self.increments
    }

    /// Operator prefactor `B(α) / (1 − α)`.
    pub fn scale(&self) -> f64 {
        self.b_alpha / (1.0 - self.alpha)
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }

    pub fn final_time(&self) -> f64 {
        self.time(self.n_steps)
    }

    /// `E_α(−γ t^α)`, the kernel itself.
    pub fn kernel(&self, t: f64) -> Result<f64> {
        ml(self.alpha, 1.0, -self.gamma * t.powf(self.alpha))
    }

    /// `t E_{α,2}(−γ t^α)`, the kernel integrated from 0 to `t`.
    pub fn kernel_integral(&self, t: f64) -> Result<f64> {
        if t == 0.0 {
            return Ok(0.0);
        }
        Ok(t * ml(self.alpha, 2.0, -self.gamma * t.powf(self.alpha))?)
    }

    fn check_len(&self, samples: &[f64]) -> Result<()> {
        if samples.len() != self.n_steps + 1 {
            return Err(Error::Dimension(format!(
                "expected {} samples on the time grid, got {}",
                self.n_steps + 1,
                samples.len()
            )));
        }
        Ok(())
    }
}

/// `B(α) = (1 − α) + α / Γ(α)`.
pub fn b_alpha(alpha: f64) -> f64 {
    (1.0 - alpha) + alpha / gamma_pos(alpha)
}

/// Left ABC derivative with base point 0 at every grid time; `d[0] = 0`.
pub fn abc_derivative_apply(samples: &[f64], setup: &FractionalSetup) -> Result<Vec<f64>> {
    setup.check_len(samples)?;
    let n_steps = setup.n_steps;
    let slopes: Vec<f64> = samples.windows(2).map(|w| (w[1] - w[0]) / setup.tau).collect();
    let scale = setup.scale();
    let mut out = vec![0.0; n_steps + 1];
    for (n, d) in out.iter_mut().enumerate().skip(1) {
        let acc: f64 = (0..n).map(|k| slopes[k] * setup.weight(n, k)).sum();
        *d = scale * acc;
    }
    Ok(out)
}

/// Backward (right) ABC derivative with base point `T`.
///
/// Realised by time reversal: `backward(y)[n] = forward(ỹ)[N − n]` with
/// `ỹ_k = y_{N−k}`, so that the operator tends to `−y'` as `α → 1`.
pub fn backward_abc_derivative_apply(samples: &[f64], setup: &FractionalSetup) -> Result<Vec<f64>> {
    setup.check_len(samples)?;
    let reversed: Vec<f64> = samples.iter().rev().copied().collect();
    let mut d = abc_derivative_apply(&reversed, setup)?;
    d.reverse();
    Ok(d)
}

/// AB fractional integral with base point 0 at every grid time.
///
/// The Riemann-Liouville part uses the product trapezoid rule: `y` is linear on
/// each interval and the power kernel `(t_n − s)^{α−1}` is integrated exactly.
pub fn ab_integral(samples: &[f64], setup: &FractionalSetup) -> Result<Vec<f64>> {
    setup.check_len(samples)?;
    let alpha = setup.alpha;
    let b = setup.b_alpha;
    let tau = setup.tau;
    let local = (1.0 - alpha) / b;
    let memory = alpha / (b * gamma_pos(alpha));
    let mut out = Vec::with_capacity(samples.len());
    for n in 0..=setup.n_steps {
        let t_n = setup.time(n);
        let mut q = 0.0;
        for k in 0..n {
            // σ = t_n − s runs over [lo, hi]
            let hi = t_n - setup.time(k);
            let lo = t_n - setup.time(k + 1);
            let m0 = (hi.powf(alpha) - lo.powf(alpha)) / alpha;
            // ∫ (s − t_k)(t_n − s)^{α−1} ds = ∫_lo^hi (hi − σ) σ^{α−1} dσ
            let m1 = hi * m0 - (hi.powf(alpha + 1.0) - lo.powf(alpha + 1.0)) / (alpha + 1.0);
            let slope = (samples[k + 1] - samples[k]) / tau;
            q += samples[k] * m0 + slope * m1;
        }
        out.push(local * samples[n] + memory * q);
    }
    Ok(out)
}

/// Closed-form solution of `ABC-D^α c = −a c`, `c(0) = c0`, for `t > 0`.
///
/// `c(t) = c0 · B / (B + (1−α) a) · E_α(−α a t^α / (B + (1−α) a))`. The value
/// jumps at `t = 0⁺` from `c0` to `c0 B / (B + (1−α) a)`.
pub fn abc_linear_ode_solution(alpha: f64, a: f64, c0: f64, t: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::Domain(format!(
            "fractional order must lie in (0, 1), got {alpha}"
        )));
    }
    if !(a.is_finite() && a >= 0.0) {
        return Err(Error::Domain(format!("decay rate must be >= 0, got {a}")));
    }
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::Domain(format!("time must be >= 0, got {t}")));
    }
    if a == 0.0 || t == 0.0 {
        return Ok(c0);
    }
    let b = b_alpha(alpha);
    let denom = b + (1.0 - alpha) * a;
    let rate = alpha * a / denom;
    Ok(c0 * (b / denom) * ml(alpha, 1.0, -rate * t.powf(alpha))?)
}

fn trapezoid(values: &[f64], tau: f64) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let inner: f64 = values[1..n - 1].iter().sum();
    tau * (inner + 0.5 * (values[0] + values[n - 1]))
}

/// Residual of the fractional integration-by-parts identity on the time grid.
///
/// ```text
/// ∫_0^T (D_0 y) v dt = ∫_0^T y (D_T v) dt
///     + B/(1−α) v(T) ∫_0^T y(s) E_α(−γ(T−s)^α) ds
///     − B/(1−α) y(0) ∫_0^T v(t) E_α(−γ t^α) dt
/// ```
///
///
/// with `D_T` the backward operator above. Integrals use the trapezoid rule.
pub fn duality_residual(y: &[f64], v: &[f64], setup: &FractionalSetup) -> Result<f64> {
    setup.check_len(y)?;
    setup.check_len(v)?;
    let n = setup.n_steps;
    let dy = abc_derivative_apply(y, setup)?;
    let dv = backward_abc_derivative_apply(v, setup)?;
    let kernel: Vec<f64> = (0..=n).map(|k| setup.kernel(setup.time(k))).collect::<Result<_>>()?;
    let lhs_terms: Vec<f64> = dy.iter().zip(v).map(|(a, b)| a * b).collect();
    let rhs_terms: Vec<f64> = y.iter().zip(&dv).map(|(a, b)| a * b).collect();
    // kernel[n - k] = E_α(−γ (T − t_k)^α)
    let terminal: Vec<f64> = (0..=n).map(|k| y[k] * kernel[n - k]).collect();
    let initial: Vec<f64> = (0..=n).map(|k| v[k] * kernel[k]).collect();
    let scale = setup.scale();
    let lhs = trapezoid(&lhs_terms, setup.tau);
    let rhs = trapezoid(&rhs_terms, setup.tau) + scale * v[n] * trapezoid(&terminal, setup.tau)
        - scale * y[0] * trapezoid(&initial, setup.tau);
    Ok((lhs - rhs).abs())
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;

    fn grid_samples(setup: &FractionalSetup, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=setup.n_steps).map(|k| f(setup.time(k))).collect()
    }

    #[test]
    fn derived_constants() {
        let s = FractionalSetup::new(0.5, 0.1, 4).unwrap();
        assert_eq!(s.gamma, 1.0);
        let expected_b = 0.5 + 0.5 / std::f64::consts::PI.sqrt();
        assert!((s.b_alpha - expected_b).abs() < 1e-15);
        assert!((b_alpha(1.0 - 1e-9) - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_out_of_range_order() {
        for alpha in [0.0, 1.0, -0.2, 1.3, f64::NAN] {
            assert!(matches!(FractionalSetup::new(alpha, 0.1, 3), Err(Error::Domain(_))));
        }
        assert!(FractionalSetup::new(0.5, 0.0, 3).is_err());
        assert!(FractionalSetup::new(0.5, 0.1, 0).is_err());
    }

    #[test]
    fn single_interval_weight() {
        // α = 0.5, τ = 1: w[1][0] = E_{0.5,2}(−1)
        let s = FractionalSetup::new(0.5, 1.0, 1).unwrap();
        assert!((s.weight(1, 0) - 0.555_962_743_251_319_578).abs() < 1e-13);
    }

    #[test]
    fn weights_telescope_and_stay_positive() {
        for &alpha in &[0.3, 0.5, 0.9, 0.95, 0.999] {
            let s = FractionalSetup::new(alpha, 0.01, 300).unwrap();
            for n in [1, 7, 150, 300] {
                let total: f64 = (0..n).map(|k| s.weight(n, k)).sum();
                let expected = s.kernel_integral(s.time(n)).unwrap();
                assert!((total - expected).abs() < 1e-9, "alpha={alpha} n={n}");
                for k in 0..n {
                    assert!(s.weight(n, k) > 0.0);
                    if k + 1 < n {
                        // recent history weighs more
                        assert!(s.weight(n, k) < s.weight(n, k + 1), "alpha={alpha} n={n} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn constant_has_zero_derivative() {
        let s = FractionalSetup::new(0.7, 0.05, 40).unwrap();
        let y = vec![3.5; 41];
        assert!(abc_derivative_apply(&y, &s).unwrap().iter().all(|&d| d == 0.0));
        assert!(backward_abc_derivative_apply(&y, &s).unwrap().iter().all(|&d| d == 0.0));
    }

    #[test]
    fn exact_on_linear_input() {
        for &alpha in &[0.5, 0.9, 0.95] {
            let s = FractionalSetup::new(alpha, 0.02, 200).unwrap();
            let y = grid_samples(&s, |t| 2.0 - 0.75 * t);
            let d = abc_derivative_apply(&y, &s).unwrap();
            assert_eq!(d[0], 0.0);
            for n in 1..=s.n_steps {
                let t = s.time(n);
                let exact = s.scale() * -0.75 * s.kernel_integral(t).unwrap();
                assert!((d[n] - exact).abs() < 1e-10, "alpha={alpha} n={n}");
            }
        }
    }

    #[test]
    fn backward_on_identity() {
        let s = FractionalSetup::new(0.6, 0.05, 60).unwrap();
        let y = grid_samples(&s, |t| t);
        let d = backward_abc_derivative_apply(&y, &s).unwrap();
        let big_t = s.final_time();
        for n in 0..=s.n_steps {
            let rem = big_t - s.time(n);
            let exact = -s.scale() * s.kernel_integral(rem.max(0.0)).unwrap();
            assert!((d[n] - exact).abs() < 1e-10, "n={n}: {} vs {exact}", d[n]);
        }
        assert_eq!(d[s.n_steps], 0.0);
    }

    #[test]
    fn backward_tends_to_minus_derivative() {
        let s = FractionalSetup::new(0.999, 0.001, 1000).unwrap();
        let y = grid_samples(&s, |t| (2.0 * t).sin());
        let d = backward_abc_derivative_apply(&y, &s).unwrap();
        let n = 400;
        let expected = -2.0 * (2.0 * s.time(n)).cos();
        assert!(
            (d[n] - expected).abs() < 0.02 * expected.abs(),
            "{} vs {expected}",
            d[n]
        );
    }

    #[test]
    fn double_reversal() {
        let s = FractionalSetup::new(0.8, 0.1, 30).unwrap();
        let y = grid_samples(&s, |t| (t * 1.3).cos() + t * t);
        let reversed: Vec<f64> = y.iter().rev().copied().collect();
        let fwd = abc_derivative_apply(&y, &s).unwrap();
        let back = backward_abc_derivative_apply(&reversed, &s).unwrap();
        for n in 0..=s.n_steps {
            assert_eq!(fwd[n], back[s.n_steps - n]);
        }
    }

    #[test]
    fn operators_check_lengths() {
        let s = FractionalSetup::new(0.5, 0.1, 5).unwrap();
        let y = vec![0.0; 5];
        assert!(matches!(abc_derivative_apply(&y, &s), Err(Error::Dimension(_))));
        assert!(matches!(
            backward_abc_derivative_apply(&y, &s),
            Err(Error::Dimension(_))
        ));
        assert!(matches!(ab_integral(&y, &s), Err(Error::Dimension(_))));
        assert!(matches!(duality_residual(&y, &y, &s), Err(Error::Dimension(_))));
    }

    #[test]
    fn ab_integral_of_constant() {
        let s = FractionalSetup::new(0.5, 0.1, 10).unwrap();
        let y = vec![2.0; 11];
        let i = ab_integral(&y, &s).unwrap();
        let b = s.b_alpha;
        let expected = 2.0 * ((1.0 - 0.5) / b + 1.0 / (b * gamma_pos(0.5)));
        assert!((i[10] - expected).abs() < 1e-13, "{} vs {expected}", i[10]);
    }

    #[test]
    fn ab_integral_near_classical_limit() {
        let s = FractionalSetup::new(0.999, 0.01, 200).unwrap();
        let y = grid_samples(&s, |t| 1.0 + t.sin());
        let i = ab_integral(&y, &s).unwrap();
        let n = s.n_steps;
        let classical = trapezoid(&y, s.tau);
        assert!(((i[n] - classical) / classical).abs() < 0.01);
    }

    #[test]
    fn ab_integral_inverts_derivative() {
        let errs: Vec<f64> = [100usize, 200]
            .iter()
            .map(|&n| {
                let s = FractionalSetup::new(0.6, 2.0 / n as f64, n).unwrap();
                let y = grid_samples(&s, |t| (1.5 * t).sin() + 0.3 * t);
                let d = abc_derivative_apply(&y, &s).unwrap();
                let back = ab_integral(&d, &s).unwrap();
                (0..=n).map(|k| (back[k] - (y[k] - y[0])).abs()).fold(0.0, f64::max)
            })
            .collect();
        assert!(errs[0] < 0.05, "{errs:?}");
        assert!(errs[1] < errs[0] * 0.75, "{errs:?}");
    }

    #[test]
    fn scalar_solution_limits() {
        assert_eq!(abc_linear_ode_solution(0.7, 0.0, 2.5, 3.0).unwrap(), 2.5);
        for &t in &[0.5, 1.0, 2.5, 5.0] {
            let c = abc_linear_ode_solution(0.999, 1.0, 1.0, t).unwrap();
            let e = (-t).exp();
            // the algebraic tail of E_α keeps a small absolute gap even close to α = 1
            assert!((c - e).abs() < 2e-3, "t={t}: {c} vs {e}");
        }
        assert!(abc_linear_ode_solution(1.0, 1.0, 1.0, 1.0).is_err());
        assert!(abc_linear_ode_solution(0.5, -1.0, 1.0, 1.0).is_err());
        assert!(abc_linear_ode_solution(0.5, 1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn scalar_solution_matches_laplace_inversion() {
        // Talbot inversion of C(s) = B c0 s^{α−1} / ((B + a(1−α)) s^α + aα), mpmath, 60 digits
        let c = abc_linear_ode_solution(0.5, 1.0, 1.0, 1.0).unwrap();
        assert!((c - 0.412_830_673_269_699_735).abs() < 1e-12, "{c}");
        let c = abc_linear_ode_solution(0.9, 1.0, 1.0, 2.0).unwrap();
        assert!((c - 0.200_467_090_559_595_506).abs() < 1e-12, "{c}");
    }

    #[test]
    fn duality_trivial_cases() {
        let s = FractionalSetup::new(0.7, 0.01, 100).unwrap();
        let zero = vec![0.0; 101];
        let v = grid_samples(&s, |t| t.cos());
        assert_eq!(duality_residual(&zero, &v, &s).unwrap(), 0.0);
        let c = vec![1.7; 101];
        assert!(duality_residual(&c, &c, &s).unwrap() < 1e-9);
    }
}
