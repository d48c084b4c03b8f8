//! Double-exponential quadrature on finite and half-infinite intervals.
//!
//! Both rules refine by halving the step in the transformed variable and reuse
//! every previous node, so each level costs only the new odd-indexed points.
//! Nodes are generated from their distance to the nearest endpoint, which keeps
//! integrable endpoint singularities from being sampled exactly at the endpoint.

use std::f64::consts::FRAC_PI_2;

/// Result of an adaptive quadrature: value plus the last level-to-level change.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Quadrature {
    pub value: f64,
    pub error: f64,
}

const MAX_LEVEL: u32 = 9;
const T_MAX: f64 = 6.0;

/// tanh-sinh rule for `∫_a^b f(x) dx`.
pub(crate) fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Quadrature {
    let half = 0.5 * (b - a);
    let center = 0.5 * (a + b);
    // contribution of the node pair at +-t (or the center at t = 0)
    let pair = |t: f64| -> f64 {
        if t == 0.0 {
            return half * FRAC_PI_2 * f(center);
        }
        let u = FRAC_PI_2 * t.sinh();
        let e = (-2.0 * u.abs()).exp();
        // 1 - tanh|u| evaluated without cancellation
        let gap = half * 2.0 * e / (1.0 + e);
        // sech^2(u) = 4 e^{-2|u|} / (1 + e^{-2|u|})^2
        let w = half * FRAC_PI_2 * t.cosh() * 4.0 * e / ((1.0 + e) * (1.0 + e));
        if gap <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let left = f(a + gap);
        let right = f(b - gap);
        w * (left + right)
    };
    refine(pair, rel_tol)
}

/// exp-sinh rule for `∫_a^∞ f(x) dx`; `f` must decay at infinity.
pub(crate) fn exp_sinh<F: Fn(f64) -> f64>(f: F, a: f64, rel_tol: f64) -> Quadrature {
    let node = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        if s > 700.0 {
            return 0.0;
        }
        let r = s.exp();
        let w = FRAC_PI_2 * t.cosh() * r;
        if r == 0.0 || !w.is_finite() {
            return 0.0;
        }
        let x = a + r;
        let v = f(x);
        if v == 0.0 {
            0.0
        } else {
            w * v
        }
    };
    let pair = |t: f64| -> f64 {
        if t == 0.0 {
            node(0.0)
        } else {
            node(t) + node(-t)
        }
    };
    refine(pair, rel_tol)
}

/// Level refinement shared by both rules; `pair(t)` returns the weighted sum at `+-t`.
fn refine<P: Fn(f64) -> f64>(pair: P, rel_tol: f64) -> Quadrature {
    let mut h = 1.0;
    let mut sum = pair(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = h * sum;
    let mut error = f64::INFINITY;
    for _ in 1..=MAX_LEVEL {
        h *= 0.5;
        let mut odd = 0.0;
        let mut j = 1;
        while (j as f64) * h <= T_MAX {
            odd += pair(j as f64 * h);
            j += 2;
        }
        sum += odd;
        let next = h * sum;
        error = (next - estimate).abs();
        estimate = next;
        if error <= rel_tol * estimate.abs() {
            break;
        }
    }
    Quadrature { value: estimate, error }
}
