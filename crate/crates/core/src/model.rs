//! SIR reaction terms with vaccination, their linearization, and the state type.

use crate::error::{Error, Result};
use crate::spatial::{Field, Grid2D};
use serde::{Deserialize, Serialize};

/// Rates of the controlled SIR model. Time in days, lengths in km.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelParams {
    /// Birth rate.
    pub mu: f64,
    /// Natural death rate.
    pub d: f64,
    /// Transmission rate per (person/km²) per day.
    pub beta: f64,
    /// Recovery rate.
    pub r: f64,
    /// Diffusion coefficients of S, I and R (km²/day).
    pub lambda1: f64,
    pub lambda2: f64,
    pub lambda3: f64,
    /// Weight of the vaccination cost.
    pub theta: f64,
}

impl Default for ModelParams {
    fn default() -> Self {
        ModelParams {
            mu: 0.02,
            d: 0.03,
            beta: 0.9,
            r: 0.04,
            lambda1: 0.6,
            lambda2: 0.6,
            lambda3: 0.6,
            theta: 1.0,
        }
    }
}

impl ModelParams {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("params.mu", self.mu),
            ("params.d", self.d),
            ("params.beta", self.beta),
            ("params.r", self.r),
            ("params.lambda1", self.lambda1),
            ("params.lambda2", self.lambda2),
            ("params.lambda3", self.lambda3),
            ("params.theta", self.theta),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::validation(name, format!("must be finite and >= 0, got {v}")));
            }
        }
        if self.theta == 0.0 {
            return Err(Error::validation("params.theta", "must be > 0"));
        }
        Ok(())
    }

    pub fn diffusion(&self) -> [f64; 3] {
        [self.lambda1, self.lambda2, self.lambda3]
    }

    pub fn max_diffusion(&self) -> f64 {
        self.lambda1.max(self.lambda2).max(self.lambda3)
    }
}

/// Susceptible, infected and recovered densities (people/km²).
#[derive(Debug, Clone, PartialEq)]
pub struct SirState {
    pub s: Field,
    pub i: Field,
    pub r: Field,
}

impl SirState {
    pub fn new(s: Field, i: Field, r: Field) -> Result<Self> {
        if s.grid() != i.grid() || s.grid() != r.grid() {
            return Err(Error::Dimension("S, I and R must share one grid".into()));
        }
        Ok(SirState { s, i, r })
    }

    pub fn uniform(grid: Grid2D, s: f64, i: f64, r: f64) -> Self {
        SirState {
            s: Field::constant(grid, s),
            i: Field::constant(grid, i),
            r: Field::constant(grid, r),
        }
    }

    pub fn grid(&self) -> Grid2D {
        self.s.grid()
    }

    /// Total population `∫ (S + I + R)`.
    pub fn population(&self) -> f64 {
        self.s.integrate() + self.i.integrate() + self.r.integrate()
    }

    pub fn components(&self) -> [&Field; 3] {
        [&self.s, &self.i, &self.r]
    }
}

/// Local rates `(f1, f2, f3)` of S, I and R at one cell.
pub fn reaction_terms(s: f64, i: f64, rr: f64, u: f64, p: &ModelParams) -> [f64; 3] {
    let infection = p.beta * s * i;
    [
        p.mu * (s + i + rr) - infection - p.d * s - u * s,
        infection - (p.d + p.r) * i,
        p.r * i - p.d * rr + u * s,
    ]
}

/// Jacobian of [`reaction_terms`] with respect to `(s, i, rr)`.
pub fn linearization_f(s: f64, i: f64, u: f64, p: &ModelParams) -> [[f64; 3]; 3] {
    [
        [p.mu - p.beta * i - p.d - u, -p.beta * s + p.mu, p.mu],
        [p.beta * i, p.beta * s - p.d - p.r, 0.0],
        [u, p.r, -p.d],
    ]
}

/// Derivative of the reaction terms with respect to the vaccination rate.
pub fn control_direction_g(s: f64) -> [f64; 3] {
    [-s, 0.0, s]
}

/// Selects the infected component.
pub fn observation_d() -> [[f64; 3]; 3] {
    [[0.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 0.0]]
}
