//! Time marching of the fractional reaction-diffusion SIR system.
//!
//! Each step solves, per component `y` with diffusion `λ`,
//!
//! `κ [W(1)(yⁿ − yⁿ⁻¹) + Hⁿ] − λΔyⁿ = local terms`,   `κ = B(α) / ((1−α)τ)`,
//!
//! where `Hⁿ = Σ_{k<n−1} W(n−k)(y^{k+1} − y^k)` is the memory of all earlier
//! increments. Loss terms are taken at the new level and gains at the old one
//! (Patankar style), and the components are updated in the order S, I, R so the
//! new `S` feeds the infection gain of `I`:
//!
//! * S: loss `(β Iⁿ⁻¹ + d) Sⁿ`, gain `μ Nⁿ⁻¹ − uⁿ⁻¹ Sⁿ⁻¹`
//! * I: loss `(d + r) Iⁿ`, gain `β Iⁿ⁻¹ Sⁿ`
//! * R: loss `d Rⁿ`, gain `r Iⁿ + uⁿ⁻¹ Sⁿ⁻¹`
//!
//! The ABC operator responds to a rate instantly with weight `(1−α)/B(α)`,
//! independent of `τ`, so a fully explicit step is unstable at realistic
//! transmission rates however small `τ` is.

use crate::error::{Error, Result};
use crate::fractional::FractionalSetup;
use crate::model::{ModelParams, SirState};
use crate::spatial::{solve_shifted, Field, Grid2D};
use serde::{Deserialize, Serialize};

/// Guards and optional memory truncation for the time steppers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    /// Any state value above this aborts the run.
    pub instability_bound: f64,
    /// Largest cumulative clipped mass, as a fraction of the initial population.
    pub max_clip_fraction: f64,
    /// Keep only the most recent `w` increments in the memory sums.
    pub memory_window: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            instability_bound: 1e6,
            max_clip_fraction: 1e-3,
            memory_window: None,
        }
    }
}

/// Vaccination rate per cell at every time index `0..=n_steps`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlTrajectory {
    grid: Grid2D,
    n_steps: usize,
    values: Vec<f64>,
}

impl ControlTrajectory {
    pub fn zeros(grid: Grid2D, n_steps: usize) -> Self {
        ControlTrajectory {
            grid,
            n_steps,
            values: vec![0.0; (n_steps + 1) * grid.cells()],
        }
    }

    pub fn constant(grid: Grid2D, n_steps: usize, u: f64) -> Result<Self> {
        Self::from_values(grid, n_steps, vec![u; (n_steps + 1) * grid.cells()])
    }

    /// `values[n * cells + c]` is the rate in cell `c` at time index `n`.
    pub fn from_values(grid: Grid2D, n_steps: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != (n_steps + 1) * grid.cells() {
            return Err(Error::Dimension(format!(
                "control has {} values, expected {}",
                values.len(),
                (n_steps + 1) * grid.cells()
            )));
        }
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0 && **v <= 1.0)) {
            return Err(Error::Domain(format!("control values must lie in [0, 1], found {v}")));
        }
        Ok(ControlTrajectory { grid, n_steps, values })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn at(&self, n: usize) -> &[f64] {
        let c = self.grid.cells();
        &self.values[n * c..(n + 1) * c]
    }

    pub fn field(&self, n: usize) -> Field {
        Field::from_values(self.grid, self.at(n).to_vec()).expect("control slices match the grid")
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(0.0, f64::max)
    }
}

/// Everything the solvers need besides the control.
#[derive(Debug, Clone, PartialEq)]
pub struct Problem {
    pub grid: Grid2D,
    pub setup: FractionalSetup,
    pub params: ModelParams,
    pub initial: SirState,
    pub options: SolverOptions,
}

impl Problem {
    pub fn new(setup: FractionalSetup, params: ModelParams, initial: SirState, options: SolverOptions) -> Result<Self> {
        params.validate()?;
        if let Some(w) = options.memory_window {
            if w == 0 {
                return Err(Error::validation("solver.memory_window", "must be >= 1"));
            }
        }
        for f in initial.components() {
            if f.values().iter().any(|&v| v < 0.0) {
                return Err(Error::Domain("initial densities must be >= 0".into()));
            }
        }
        Ok(Problem {
            grid: initial.grid(),
            setup,
            params,
            initial,
            options,
        })
    }

    pub fn n_steps(&self) -> usize {
        self.setup.n_steps
    }

    /// `κ W(l)` for lags `0..=n_steps`, zeroed beyond the memory window.
    pub(crate) fn memory_lags(&self) -> Vec<f64> {
        let kappa = self.setup.scale() / self.setup.tau;
        let window = self.options.memory_window.unwrap_or(usize::MAX);
        self.setup
            .lag_weights()
            .iter()
            .enumerate()
            .map(|(l, w)| if l <= window { kappa * w } else { 0.0 })
            .collect()
    }

    fn check_control(&self, u: &ControlTrajectory) -> Result<()> {
        if u.grid() != self.grid || u.n_steps() != self.n_steps() {
            return Err(Error::Dimension(format!(
                "control is {}x{} over {} steps, problem is {}x{} over {} steps",
                u.grid().nx,
                u.grid().ny,
                u.n_steps(),
                self.grid.nx,
                self.grid.ny,
                self.n_steps()
            )));
        }
        Ok(())
    }
}

/// States at every time index, stored as `[n][component][cell]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateTrajectory {
    grid: Grid2D,
    n_steps: usize,
    tau: f64,
    values: Vec<f64>,
    clipped_mass: f64,
}

impl StateTrajectory {
    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn n_steps(&self) -> usize {
        self.n_steps
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn time(&self, n: usize) -> f64 {
        n as f64 * self.tau
    }

    /// Component 0, 1 or 2 (S, I, R) at time index `n`.
    pub fn component(&self, n: usize, comp: usize) -> &[f64] {
        let c = self.grid.cells();
        let start = (3 * n + comp) * c;
        &self.values[start..start + c]
    }

    pub fn s(&self, n: usize) -> &[f64] {
        self.component(n, 0)
    }

    pub fn i(&self, n: usize) -> &[f64] {
        self.component(n, 1)
    }

    pub fn r(&self, n: usize) -> &[f64] {
        self.component(n, 2)
    }

    pub fn state(&self, n: usize) -> SirState {
        let f = |comp| Field::from_values(self.grid, self.component(n, comp).to_vec()).expect("slices match the grid");
        SirState {
            s: f(0),
            i: f(1),
            r: f(2),
        }
    }

    pub fn final_state(&self) -> SirState {
        self.state(self.n_steps)
    }

    /// Total mass removed by the positivity guard.
    pub fn clipped_mass(&self) -> f64 {
        self.clipped_mass
    }

    pub fn population(&self, n: usize) -> f64 {
        let area = self.grid.cell_area();
        (0..3).map(|c| self.component(n, c).iter().sum::<f64>()).sum::<f64>() * area
    }
}

/// Incremental forward solver holding the full history.
pub struct ForwardStepper<'a> {
    problem: &'a Problem,
    lags: Vec<f64>,
    values: Vec<f64>,
    increments: Vec<f64>,
    step: usize,
    clipped_mass: f64,
    clip_limit: f64,
    memory: Vec<f64>,
    rhs: Vec<f64>,
    diag: Vec<f64>,
}

impl<'a> ForwardStepper<'a> {
    pub fn new(problem: &'a Problem) -> Self {
        let cells = problem.grid.cells();
        let m = problem.n_steps();
        let mut values = Vec::with_capacity((m + 1) * 3 * cells);
        for f in problem.initial.components() {
            values.extend_from_slice(f.values());
        }
        ForwardStepper {
            problem,
            lags: problem.memory_lags(),
            values,
            increments: Vec::with_capacity(m * 3 * cells),
            step: 0,
            clipped_mass: 0.0,
            clip_limit: problem.options.max_clip_fraction * problem.initial.population(),
            memory: vec![0.0; 3 * cells],
            rhs: vec![0.0; cells],
            diag: vec![0.0; cells],
        }
    }

    /// Index of the last computed state.
    pub fn current_step(&self) -> usize {
        self.step
    }

    /// Advances one step using the control `u_prev` from the previous time index.
    pub fn step(&mut self, u_prev: &[f64]) -> Result<()> {
        let p = &self.problem.params;
        let grid = self.problem.grid;
        let cells = grid.cells();
        let block = 3 * cells;
        if self.step >= self.problem.n_steps() {
            return Err(Error::Domain("time grid exhausted".into()));
        }
        if u_prev.len() != cells {
            return Err(Error::Dimension(format!(
                "control slice has {} cells, grid has {cells}",
                u_prev.len()
            )));
        }
        let n = self.step + 1;

        // memory of increments 0..n−2
        self.memory.iter_mut().for_each(|v| *v = 0.0);
        for k in 0..n.saturating_sub(1) {
            let w = self.lags[n - k];
            if w == 0.0 {
                continue;
            }
            let inc = &self.increments[k * block..(k + 1) * block];
            for (acc, d) in self.memory.iter_mut().zip(inc) {
                *acc += w * d;
            }
        }
        let lead = self.lags[1];

        let prev_start = (n - 1) * block;
        let prev = self.values[prev_start..prev_start + block].to_vec();
        let (s_old, rest) = prev.split_at(cells);
        let (i_old, r_old) = rest.split_at(cells);
        let mut next = vec![0.0; block];

        for c in 0..cells {
            let pop = s_old[c] + i_old[c] + r_old[c];
            self.rhs[c] = lead * s_old[c] - self.memory[c] + p.mu * pop - u_prev[c] * s_old[c];
            self.diag[c] = lead + p.beta * i_old[c] + p.d;
        }
        solve_shifted(grid, &self.diag, p.lambda1, &self.rhs, &mut next[..cells])?;
        self.clip(n, &mut next[..cells])?;

        for c in 0..cells {
            self.rhs[c] = lead * i_old[c] - self.memory[cells + c] + p.beta * i_old[c] * next[c];
            self.diag[c] = lead + p.d + p.r;
        }
        solve_shifted(grid, &self.diag, p.lambda2, &self.rhs, &mut next[cells..2 * cells])?;
        self.clip(n, &mut next[cells..2 * cells])?;

        for c in 0..cells {
            self.rhs[c] = lead * r_old[c] - self.memory[2 * cells + c] + p.r * next[cells + c] + u_prev[c] * s_old[c];
            self.diag[c] = lead + p.d;
        }
        solve_shifted(grid, &self.diag, p.lambda3, &self.rhs, &mut next[2 * cells..])?;
        self.clip(n, &mut next[2 * cells..])?;

        let bound = self.problem.options.instability_bound;
        if let Some(v) = next.iter().find(|v| !(v.is_finite() && **v <= bound)) {
            return Err(Error::Instability {
                step: n,
                message: format!("state value {v} exceeds bound {bound}"),
            });
        }
        for (new, old) in next.iter().zip(&prev) {
            self.increments.push(new - old);
        }
        self.values.extend_from_slice(&next);
        self.step = n;
        Ok(())
    }

    fn clip(&mut self, n: usize, values: &mut [f64]) -> Result<()> {
        let area = self.problem.grid.cell_area();
        for v in values.iter_mut() {
            if *v < 0.0 {
                self.clipped_mass += -*v * area;
                *v = 0.0;
            }
        }
        if self.clipped_mass > self.clip_limit {
            return Err(Error::Positivity {
                step: n,
                clipped: self.clipped_mass,
                limit: self.clip_limit,
            });
        }
        Ok(())
    }

    pub fn into_trajectory(self) -> StateTrajectory {
        StateTrajectory {
            grid: self.problem.grid,
            n_steps: self.step,
            tau: self.problem.setup.tau,
            values: self.values,
            clipped_mass: self.clipped_mass,
        }
    }
}

/// Marches the whole time grid under control `u`.
pub fn solve_forward(problem: &Problem, u: &ControlTrajectory) -> Result<StateTrajectory> {
    problem.check_control(u)?;
    let mut stepper = ForwardStepper::new(problem);
    for n in 0..problem.n_steps() {
        stepper.step(u.at(n))?;
    }
    let traj = stepper.into_trajectory();
    if traj.clipped_mass > 0.0 {
        log::debug!("positivity guard clipped {:.3e} people", traj.clipped_mass);
    }
    Ok(traj)
}
