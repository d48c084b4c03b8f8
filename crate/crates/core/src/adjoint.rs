//! Adjoint of the discrete forward map.
//!
//! The multipliers `πⁿ` of the step residuals satisfy the transposed step
//! equations, swept from `n = m` down to 1:
//!
//! `(κW(1) + L_jᵀ) π^j = g^j − Σ_{n>j} κ(W(n−j+1) − W(n−j)) πⁿ − C_{j+1}ᵀ π^{j+1}`,
//!
//! with `L_j` the local Jacobian of step `j` in its new values (lower triangular
//! in S, I, R, so the transpose is solved R, I, S), `C_{j+1}` the dependence of
//! step `j+1` on the old values, and `g^j = ∂J/∂y^j`. Every term on the right is
//! a backward ABC memory sum with the same weights as the forward solver, which
//! is the time-reversed operator acting on the multipliers.
//!
//! The multipliers are rescaled to `p^k = π^{k+1} / (2h²τω_k)`, `ω` the
//! trapezoid weights, and `p^m = (0, I(T), 0)`. Then
//! `∂J/∂u^k = 2h²τω_k (θu^k + G(S^k)·p^k)` holds exactly.

use crate::error::Result;
use crate::forward::{ControlTrajectory, Problem, StateTrajectory};
use crate::spatial::{solve_shifted, Field, Grid2D};

/// Adjoint components per time index, stored as `[n][component][cell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdjointTrajectory {
    grid: Grid2D,
    n_steps: usize,
    values: Vec<f64>,
}

impl AdjointTrajectory {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn component(&self, n: usize, comp: usize) -> &[f64] {
        let c = self.grid.cells();
        let start = (3 * n + comp) * c;
        &self.values[start..start + c]
    }

    pub fn p1(&self, n: usize) -> &[f64] {
        self.component(n, 0)
    }

    pub fn p2(&self, n: usize) -> &[f64] {
        self.component(n, 1)
    }

    pub fn p3(&self, n: usize) -> &[f64] {
        self.component(n, 2)
    }

    pub fn field(&self, n: usize, comp: usize) -> Field {
        Field::from_values(self.grid, self.component(n, comp).to_vec()).expect("slices match the grid")
    }

    /// Every multiplier times `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        AdjointTrajectory {
            values: self.values.iter().map(|v| v * factor).collect(),
            ..self.clone()
        }
    }
}

/// Trapezoid weight of time index `k` on `0..=m`.
pub(crate) fn trapezoid_weight(k: usize, m: usize) -> f64 {
    if k == 0 || k == m {
        0.5
    } else {
        1.0
    }
}

/// Solves the adjoint system for the forward trajectory `traj` under control `u`.
pub fn solve_adjoint(problem: &Problem, traj: &StateTrajectory, u: &ControlTrajectory) -> Result<AdjointTrajectory> {
    let p = &problem.params;
    let grid = problem.grid;
    let cells = grid.cells();
    let block = 3 * cells;
    let m = problem.n_steps();
    let tau = problem.setup.tau;
    let area = grid.cell_area();
    let lags = problem.memory_lags();
    // coefficient of y^j in step n = j + l for l ≥ 1; the lags are already
    // zero beyond the memory window, and l + 1 ≤ m
    let cross: Vec<f64> = (0..m)
        .map(|l| if l == 0 { 0.0 } else { lags[l + 1] - lags[l] })
        .collect();
    let lead = lags[1];

    // multipliers π^n, n = 1..=m, at offset (n − 1) * block
    let mut pi = vec![0.0; m * block];
    let mut rhs = vec![0.0; block];
    let mut diag = vec![0.0; cells];
    let mut b = vec![0.0; cells];

    for j in (1..=m).rev() {
        rhs.iter_mut().for_each(|v| *v = 0.0);
        let obs = 2.0 * area * (tau * trapezoid_weight(j, m) + if j == m { 1.0 } else { 0.0 });
        for (c, &i) in traj.i(j).iter().enumerate() {
            rhs[cells + c] = obs * i;
        }
        for n in j + 1..=m {
            let w = cross[n - j];
            if w == 0.0 {
                continue;
            }
            let later = &pi[(n - 1) * block..n * block];
            for (acc, v) in rhs.iter_mut().zip(later) {
                *acc -= w * v;
            }
        }
        if j < m {
            let next = &pi[j * block..(j + 1) * block];
            let s_next = traj.s(j + 1);
            let u_j = u.at(j);
            for c in 0..cells {
                let (ps, pi_, pr) = (next[c], next[cells + c], next[2 * cells + c]);
                rhs[c] -= (u_j[c] - p.mu) * ps - u_j[c] * pr;
                rhs[cells + c] -= (p.beta * s_next[c] - p.mu) * ps - p.beta * s_next[c] * pi_;
                rhs[2 * cells + c] -= -p.mu * ps;
            }
        }

        let i_prev = traj.i(j - 1);
        let out = &mut pi[(j - 1) * block..j * block];
        let (out_s, rest) = out.split_at_mut(cells);
        let (out_i, out_r) = rest.split_at_mut(cells);

        diag.iter_mut().for_each(|v| *v = lead + p.d);
        solve_shifted(grid, &diag, p.lambda3, &rhs[2 * cells..], out_r)?;

        for c in 0..cells {
            b[c] = rhs[cells + c] + p.r * out_r[c];
            diag[c] = lead + p.d + p.r;
        }
        solve_shifted(grid, &diag, p.lambda2, &b, out_i)?;

        for c in 0..cells {
            b[c] = rhs[c] + p.beta * i_prev[c] * out_i[c];
            diag[c] = lead + p.beta * i_prev[c] + p.d;
        }
        solve_shifted(grid, &diag, p.lambda1, &b, out_s)?;
    }

    let mut values = Vec::with_capacity((m + 1) * block);
    for k in 0..m {
        let scale = 1.0 / (2.0 * area * tau * trapezoid_weight(k, m));
        values.extend(pi[k * block..(k + 1) * block].iter().map(|v| v * scale));
    }
    values.extend(std::iter::repeat_n(0.0, cells));
    values.extend_from_slice(traj.i(m));
    values.extend(std::iter::repeat_n(0.0, cells));
    Ok(AdjointTrajectory {
        grid,
        n_steps: m,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::{solve_forward, SolverOptions};
    use crate::fractional::FractionalSetup;
    use crate::model::{ModelParams, SirState};

    #[test]
    fn no_infection_gives_zero_adjoint() {
        let g = Grid2D::new(3, 3, 1.0).unwrap();
        let setup = FractionalSetup::new(0.9, 0.02, 50).unwrap();
        let pr = Problem::new(
            setup,
            ModelParams::default(),
            SirState::uniform(g, 50.0, 0.0, 0.0),
            SolverOptions::default(),
        )
        .unwrap();
        let u = ControlTrajectory::constant(g, 50, 0.2).unwrap();
        let traj = solve_forward(&pr, &u).unwrap();
        let adj = solve_adjoint(&pr, &traj, &u).unwrap();
        assert!(adj.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn terminal_condition_and_symmetry() {
        let g = Grid2D::new(3, 2, 1.0).unwrap();
        let setup = FractionalSetup::new(0.95, 0.02, 40).unwrap();
        let pr = Problem::new(
            setup,
            ModelParams::default(),
            SirState::uniform(g, 45.0, 2.0, 0.0),
            SolverOptions::default(),
        )
        .unwrap();
        let u = ControlTrajectory::constant(g, 40, 0.1).unwrap();
        let traj = solve_forward(&pr, &u).unwrap();
        let adj = solve_adjoint(&pr, &traj, &u).unwrap();
        assert!(adj.p1(40).iter().all(|&v| v == 0.0));
        assert!(adj.p3(40).iter().all(|&v| v == 0.0));
        assert_eq!(adj.p2(40), traj.i(40));
        for n in [0, 13, 39] {
            for comp in 0..3 {
                let v = adj.component(n, comp);
                assert!(v.iter().all(|x| x.is_finite()));
                assert!(v.iter().all(|x| (x - v[0]).abs() <= 1e-10 * v[0].abs().max(1.0)));
            }
        }
    }
}
