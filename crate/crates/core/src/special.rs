//! Gamma and two-parameter Mittag-Leffler functions of a real argument.
//!
//! `E_{α,ξ}(z) = Σ_{k≥0} z^k / Γ(kα + ξ)`.
//!
//! Three evaluation regimes are used:
//!
//! * the power series, for `z ≥ 0`, `|z| ≤ 1`, and `α > 1`;
//! * for `0 < α < 1` and moderately negative `z`, the real-line Laplace
//!   inversion integral
//!   `E_{α,ξ}(−x) = (1/π) ∫_0^∞ e^{−r} r^{α−ξ} (r^α sin(ξπ) − x sin((α−ξ)π)) /
//!   (r^{2α} + 2x r^α cos(απ) + x²) dr`, valid for `ξ < 1 + α`;
//!   larger `ξ` is brought into range with `E_{α,ξ}(z) = (E_{α,ξ−α}(z) − 1/Γ(ξ−α)) / z`;
//! * the asymptotic expansion `E_{α,ξ}(z) ~ −Σ_{k≥1} z^{−k} / Γ(ξ − kα)` once
//!   `|z|^{1/α}` is large enough that its optimally truncated remainder is
//!   negligible.
//!
//! `α = 1` with integer `ξ` is evaluated through `exp`/`expm1` directly.

use crate::error::{Error, Result};
use crate::quad;
use std::f64::consts::PI;

const LANCZOS_G: f64 = 5.242_187_5;
const LANCZOS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Lanczos series factor and log prefix for `x > 0`.
fn lanczos_parts(x: f64) -> (f64, f64) {
    let tmp = x + LANCZOS_G;
    let log_prefix = (x + 0.5) * tmp.ln() - tmp;
    let mut ser = 0.999_999_999_999_997_092;
    let mut y = x;
    for c in LANCZOS {
        y += 1.0;
        ser += c / y;
    }
    (log_prefix, SQRT_2PI * ser / x)
}

/// `sin(πx)` with the argument reduced first, accurate near the integers.
pub(crate) fn sin_pi(x: f64) -> f64 {
    let n = x.round();
    let f = x - n;
    let s = (PI * f).sin();
    if (n as i64) % 2 == 0 {
        s
    } else {
        -s
    }
}

/// Gamma function for finite `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("gamma requires finite x > 0, got {x}")));
    }
    Ok(gamma_pos(x))
}

/// Natural log of the Gamma function for finite `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("ln_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_pos(x))
}

pub(crate) fn gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        // reflection keeps the Lanczos sum in its accurate range
        return PI / (sin_pi(x) * gamma_pos(1.0 - x));
    }
    if x == x.floor() && x <= 23.0 {
        let mut f = 1.0;
        let mut k = 2.0;
        while k < x {
            f *= k;
            k += 1.0;
        }
        return f;
    }
    let (log_prefix, ser) = lanczos_parts(x);
    log_prefix.exp() * ser
}

pub(crate) fn ln_gamma_pos(x: f64) -> f64 {
    if x < 0.5 {
        return (PI / sin_pi(x).abs()).ln() - ln_gamma_pos(1.0 - x);
    }
    let (log_prefix, ser) = lanczos_parts(x);
    log_prefix + ser.ln()
}

/// `1/Γ(x)` for every real `x`; zero at the non-positive integers.
pub(crate) fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        return sin_pi(x) * gamma_pos(1.0 - x) / PI;
    }
    if x > 171.0 {
        return (-ln_gamma_pos(x)).exp();
    }
    1.0 / gamma_pos(x)
}

/// Arguments of a Mittag-Leffler evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlQuery {
    pub alpha: f64,
    pub xi: f64,
    pub z: f64,
}

impl MlQuery {
    pub fn new(alpha: f64, xi: f64, z: f64) -> Result<Self> {
        let q = MlQuery { alpha, xi, z };
        q.validate()?;
        Ok(q)
    }

    fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0 && self.alpha <= 2.0) {
            return Err(Error::Domain(format!(
                "Mittag-Leffler order alpha must lie in (0, 2], got {}",
                self.alpha
            )));
        }
        if !(self.xi.is_finite() && self.xi > 0.0) {
            return Err(Error::Domain(format!(
                "Mittag-Leffler parameter xi must be finite and > 0, got {}",
                self.xi
            )));
        }
        if !self.z.is_finite() {
            return Err(Error::Domain(format!(
                "Mittag-Leffler argument must be finite, got {}",
                self.z
            )));
        }
        Ok(())
    }
}

/// Two-parameter Mittag-Leffler function `E_{α,ξ}(z)`.
pub fn mittag_leffler(q: MlQuery) -> Result<f64> {
    q.validate()?;
    let MlQuery { alpha, xi, z } = q;
    if z == 0.0 {
        return Ok(rgamma(xi));
    }
    if alpha == 1.0 && xi == xi.floor() && xi <= 8.0 && z.abs() > 1.0 {
        return Ok(exponential_family(xi as u32, z));
    }
    if z > 0.0 || z.abs() <= 1.0 || alpha >= 1.0 {
        return series(alpha, xi, z);
    }
    negative_real(alpha, xi, -z)
}

/// Shorthand for `mittag_leffler(MlQuery::new(alpha, xi, z)?)`.
pub fn ml(alpha: f64, xi: f64, z: f64) -> Result<f64> {
    mittag_leffler(MlQuery::new(alpha, xi, z)?)
}

/// `E_{1,n}(z)` from `e^z` and the upward recurrence; used for `|z| > 1`.
fn exponential_family(n: u32, z: f64) -> f64 {
    let mut e = z.exp();
    if n >= 2 {
        e = z.exp_m1() / z;
    }
    let mut k = 2;
    while k < n {
        // E_{1,k+1}(z) = (E_{1,k}(z) - 1/Γ(k)) / z
        e = (e - rgamma(k as f64)) / z;
        k += 1;
    }
    e
}

/// Neumaier-compensated accumulator.
#[derive(Default)]
struct Compensated {
    sum: f64,
    comp: f64,
}

impl Compensated {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const SERIES_MAX_TERMS: usize = 50_000;

fn series(alpha: f64, xi: f64, z: f64) -> Result<f64> {
    let ln_abs = z.abs().ln();
    let negative = z < 0.0;
    let mut acc = Compensated::default();
    let mut max_term: f64 = 0.0;
    let mut prev = f64::INFINITY;
    for k in 0..SERIES_MAX_TERMS {
        let arg = k as f64 * alpha + xi;
        let term = if arg > 150.0 {
            let mag = (k as f64 * ln_abs - ln_gamma_pos(arg)).exp();
            if negative && k % 2 == 1 {
                -mag
            } else {
                mag
            }
        } else {
            z.powi(k as i32) * rgamma(arg)
        };
        if !term.is_finite() {
            return Err(Error::Accuracy(format!(
                "Mittag-Leffler series overflowed at alpha={alpha}, xi={xi}, z={z}"
            )));
        }
        acc.add(term);
        max_term = max_term.max(term.abs());
        let s = acc.value().abs();
        // stop once terms are decreasing and negligible
        if k > 2 && term.abs() <= prev && term.abs() <= 1e-17 * s.max(f64::MIN_POSITIVE) {
            let value = acc.value();
            let round_off = max_term * f64::EPSILON * 4.0;
            if round_off > 1e-10 * value.abs().max(1e-300) && round_off > 1e-14 {
                return Err(Error::Accuracy(format!(
                    "Mittag-Leffler series lost precision to cancellation at alpha={alpha}, xi={xi}, z={z}"
                )));
            }
            return Ok(value);
        }
        if term != 0.0 {
            prev = term.abs();
        }
    }
    Err(Error::Accuracy(format!(
        "Mittag-Leffler series did not converge at alpha={alpha}, xi={xi}, z={z}"
    )))
}

/// `E_{α,ξ}(−x)` for `0 < α < 1`, `x > 1`.
fn negative_real(alpha: f64, xi: f64, x: f64) -> Result<f64> {
    if x.powf(1.0 / alpha) > 45.0 {
        if let Some(v) = asymptotic(alpha, xi, x) {
            return Ok(v);
        }
    }
    integral_reduced(alpha, xi, x)
}

/// Optimally truncated asymptotic expansion; `None` if the smallest term is not negligible.
fn asymptotic(alpha: f64, xi: f64, x: f64) -> Option<f64> {
    let z = -x;
    let mut acc = Compensated::default();
    let mut zpow = 1.0;
    let mut smallest = f64::INFINITY;
    for k in 1..400 {
        zpow /= z;
        let arg = xi - k as f64 * alpha;
        // |1/Γ(y)| ≤ Γ(1−y)/π for y < 1/2; terms near poles say nothing about convergence
        let bound = if arg < 0.5 {
            gamma_pos(1.0 - arg) / PI
        } else {
            rgamma(arg).abs()
        };
        let envelope = zpow.abs() * bound;
        if envelope > smallest {
            break;
        }
        smallest = envelope;
        acc.add(-zpow * rgamma(arg));
        if envelope <= 1e-17 * acc.value().abs() {
            return Some(acc.value());
        }
    }
    let v = acc.value();
    if smallest <= 1e-15 * v.abs() {
        Some(v)
    } else {
        None
    }
}

/// Integral representation with the downward recurrence in `ξ`.
fn integral_reduced(alpha: f64, xi: f64, x: f64) -> Result<f64> {
    let z = -x;
    // the integrand behaves like r^{α−ξ} at r → 0; keep that exponent above −1/2
    // by stepping ξ down with E_{α,ξ}(z) = (E_{α,ξ−α}(z) − 1/Γ(ξ−α)) / z
    if xi > alpha + 0.5 {
        let lower = xi - alpha;
        let e = if (lower - 1.0).abs() < 1e-12 {
            integral(alpha, 1.0, x)?
        } else {
            integral_reduced(alpha, lower, x)?
        };
        return Ok((e - rgamma(lower)) / z);
    }
    integral(alpha, xi, x)
}

fn integral(alpha: f64, xi: f64, x: f64) -> Result<f64> {
    let sin_xi = sin_pi(xi);
    let sin_diff = sin_pi(alpha - xi);
    let cos_a = (PI * alpha).cos();
    let integrand = |r: f64| -> f64 {
        if r <= 0.0 {
            return 0.0;
        }
        let lr = r.ln();
        let ra = (alpha * lr).exp();
        let num = ra * sin_xi - x * sin_diff;
        let den = ra * ra + 2.0 * x * ra * cos_a + x * x;
        ((alpha - xi) * lr - r).exp() * num / den
    };
    const TOL: f64 = 1e-14;
    let (value, error) = if cos_a < 0.0 {
        // the denominator is smallest where r^α = −x cos(απ); split there
        let peak = (-x * cos_a).powf(1.0 / alpha);
        let left = quad::tanh_sinh(integrand, 0.0, peak, TOL);
        let right = quad::exp_sinh(integrand, peak, TOL);
        (left.value + right.value, left.error + right.error)
    } else {
        let split = 1.0;
        let left = quad::tanh_sinh(integrand, 0.0, split, TOL);
        let right = quad::exp_sinh(integrand, split, TOL);
        (left.value + right.value, left.error + right.error)
    };
    let value = value / PI;
    let error = error / PI;
    if !(value.is_finite()) || error > 1e-11 * value.abs().max(1e-300) {
        return Err(Error::Accuracy(format!(
            "Mittag-Leffler integral did not converge at alpha={alpha}, xi={xi}, z={} (err {error:e})",
            -x
        )));
    }
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0).unwrap(), 1.0);
        assert_eq!(gamma(5.0).unwrap(), 24.0);
        assert!(rel(gamma(0.5).unwrap(), PI.sqrt()) < 1e-14);
        assert!(rel(gamma(1.5).unwrap(), 0.5 * PI.sqrt()) < 1e-14);
        // Γ(50) = 49!
        assert!(rel(gamma(50.0).unwrap(), 6.082_818_640_342_675_6e62) < 1e-12);
        assert!(rel(gamma(0.1).unwrap(), 9.513_507_698_668_731_8) < 1e-13);
        assert!(rel(gamma(7.3).unwrap(), 1_271.423_633_663_911_4) < 1e-12);
    }

    #[test]
    fn gamma_rejects_nonpositive() {
        assert!(matches!(gamma(0.0), Err(Error::Domain(_))));
        assert!(matches!(gamma(-1.5), Err(Error::Domain(_))));
        assert!(matches!(gamma(f64::NAN), Err(Error::Domain(_))));
        assert!(matches!(gamma(f64::INFINITY), Err(Error::Domain(_))));
    }

    #[test]
    fn rgamma_at_poles_and_negative_values() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-3.0), 0.0);
        // Γ(-0.5) = -2 sqrt(pi)
        assert!(rel(rgamma(-0.5), -1.0 / (2.0 * PI.sqrt())) < 1e-14);
    }

    #[test]
    fn ml_spot_values() {
        assert!(rel(ml(1.0, 1.0, 1.0).unwrap(), std::f64::consts::E) < 1e-15);
        assert_eq!(ml(0.9, 1.0, 0.0).unwrap(), 1.0);
        assert!(rel(ml(2.0, 1.0, -4.0).unwrap(), 2.0f64.cos()) < 1e-13);
        // e * erfc(1)
        assert!(rel(ml(0.5, 1.0, -1.0).unwrap(), 0.427_583_576_155_807_004) < 1e-12);
    }

    #[test]
    fn ml_rejects_bad_parameters() {
        assert!(matches!(MlQuery::new(0.0, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(MlQuery::new(2.5, 1.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(MlQuery::new(0.5, 0.0, 1.0), Err(Error::Domain(_))));
        assert!(matches!(MlQuery::new(0.5, 1.0, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn regimes_agree_at_switchover() {
        // the asymptotic and integral regimes must coincide where both apply
        for &alpha in &[0.3, 0.5, 0.7, 0.9, 0.95] {
            for &xi in &[1.0, 2.0, alpha, alpha + 1.0] {
                for &x in &[50.0f64, 80.0, 200.0] {
                    if x.powf(1.0 / alpha) <= 45.0 {
                        continue;
                    }
                    let a = asymptotic(alpha, xi, x).unwrap();
                    let b = integral_reduced(alpha, xi, x).unwrap();
                    assert!(rel(a, b) < 1e-10, "alpha={alpha} xi={xi} x={x}: {a} vs {b}");
                }
            }
        }
    }

    #[test]
    fn series_and_integral_agree_near_minus_one() {
        for &alpha in &[0.3, 0.6, 0.9, 0.999] {
            for &xi in &[1.0, 2.0, alpha] {
                let a = series(alpha, xi, -1.2).unwrap();
                let b = integral_reduced(alpha, xi, 1.2).unwrap();
                assert!(rel(a, b) < 1e-11, "alpha={alpha} xi={xi}: {a} vs {b}");
            }
        }
    }
}
