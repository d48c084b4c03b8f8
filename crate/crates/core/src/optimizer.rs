//! Cost functional, control update and the forward-backward sweep.
//!
//! `J(u) = ∫∫ I² + ∫ I(T)² + θ ∫∫ u²` over space-time, discretized with the
//! midpoint rule in space and the trapezoid rule in time. All space-time norms
//! below use the same weights.

use crate::adjoint::{solve_adjoint, trapezoid_weight, AdjointTrajectory};
use crate::error::{Error, Result};
use crate::forward::{solve_forward, ControlTrajectory, Problem, StateTrajectory};
use crate::model::ModelParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// The three terms of the cost and their sum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Objective {
    pub total: f64,
    pub infection: f64,
    pub terminal: f64,
    pub control: f64,
}

fn check_shapes(traj: &StateTrajectory, u: &ControlTrajectory) -> Result<()> {
    if traj.grid() != u.grid() || traj.n_steps() != u.n_steps() {
        return Err(Error::Dimension("state and control live on different grids".into()));
    }
    Ok(())
}

fn sum_sq(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum()
}

pub fn evaluate_objective(traj: &StateTrajectory, u: &ControlTrajectory, p: &ModelParams) -> Result<Objective> {
    check_shapes(traj, u)?;
    let m = traj.n_steps();
    let area = traj.grid().cell_area();
    let tau = traj.tau();
    let mut infection = 0.0;
    let mut control = 0.0;
    for n in 0..=m {
        let w = tau * trapezoid_weight(n, m) * area;
        infection += w * sum_sq(traj.i(n));
        control += w * sum_sq(u.at(n));
    }
    let control = p.theta * control;
    let terminal = area * sum_sq(traj.i(m));
    Ok(Objective {
        total: infection + terminal + control,
        infection,
        terminal,
        control,
    })
}

/// Cost accumulated over `[0, t_n]` for every `n`; the last entry adds the
/// terminal term and so equals `J`.
pub fn running_objective(traj: &StateTrajectory, u: &ControlTrajectory, p: &ModelParams) -> Result<Vec<f64>> {
    check_shapes(traj, u)?;
    let m = traj.n_steps();
    let area = traj.grid().cell_area();
    let tau = traj.tau();
    let density = |n: usize| area * (sum_sq(traj.i(n)) + p.theta * sum_sq(u.at(n)));
    let mut out = Vec::with_capacity(m + 1);
    let mut acc = 0.0;
    let mut prev = density(0);
    out.push(0.0);
    for n in 1..=m {
        let cur = density(n);
        acc += 0.5 * tau * (prev + cur);
        out.push(acc);
        prev = cur;
    }
    out[m] += area * sum_sq(traj.i(m));
    Ok(out)
}

/// `clamp((S/θ)(p1 − p3), 0, 1)` per cell and time index.
pub fn project_control(traj: &StateTrajectory, adj: &AdjointTrajectory, p: &ModelParams) -> ControlTrajectory {
    let m = traj.n_steps();
    let mut values = Vec::with_capacity((m + 1) * traj.grid().cells());
    for n in 0..=m {
        for ((s, p1), p3) in traj.s(n).iter().zip(adj.p1(n)).zip(adj.p3(n)) {
            values.push((s / p.theta * (p1 - p3)).clamp(0.0, 1.0));
        }
    }
    ControlTrajectory::from_values(traj.grid(), m, values).expect("clamped values are admissible")
}

/// `θu + G(S)·p` per cell and time index, the gradient density of `J` up to
/// the factor 2 from the squared norms.
pub fn gradient_density(
    traj: &StateTrajectory,
    adj: &AdjointTrajectory,
    u: &ControlTrajectory,
    p: &ModelParams,
) -> Vec<f64> {
    let m = traj.n_steps();
    let mut out = Vec::with_capacity((m + 1) * traj.grid().cells());
    for n in 0..=m {
        for (((s, p1), p3), uv) in traj.s(n).iter().zip(adj.p1(n)).zip(adj.p3(n)).zip(u.at(n)) {
            out.push(p.theta * uv + s * (p3 - p1));
        }
    }
    out
}

/// The seven space-time quantities compared between sweep iterations.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateBundle {
    /// S, I, R, p1, p2, p3, u, each flattened as `[n][cell]`.
    pub parts: [Vec<f64>; 7],
    pub n_steps: usize,
    pub cells: usize,
    pub cell_area: f64,
    pub tau: f64,
}

impl IterateBundle {
    pub fn new(traj: &StateTrajectory, adj: &AdjointTrajectory, u: &ControlTrajectory) -> Self {
        let m = traj.n_steps();
        let gather = |f: &dyn Fn(usize) -> Vec<f64>| (0..=m).flat_map(f).collect::<Vec<f64>>();
        IterateBundle {
            parts: [
                gather(&|n| traj.s(n).to_vec()),
                gather(&|n| traj.i(n).to_vec()),
                gather(&|n| traj.r(n).to_vec()),
                gather(&|n| adj.p1(n).to_vec()),
                gather(&|n| adj.p2(n).to_vec()),
                gather(&|n| adj.p3(n).to_vec()),
                u.values().to_vec(),
            ],
            n_steps: m,
            cells: traj.grid().cells(),
            cell_area: traj.grid().cell_area(),
            tau: traj.tau(),
        }
    }

    /// A bundle of zeros with the shape of `like`.
    pub fn zeros_like(like: &IterateBundle) -> Self {
        let mut z = like.clone();
        for part in z.parts.iter_mut() {
            part.iter_mut().for_each(|v| *v = 0.0);
        }
        z
    }

    fn norm_of(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut acc = 0.0;
        for n in 0..=self.n_steps {
            let w = self.tau * trapezoid_weight(n, self.n_steps) * self.cell_area;
            let row: f64 = (n * self.cells..(n + 1) * self.cells).map(|k| f(k).powi(2)).sum();
            acc += w * row;
        }
        acc.sqrt()
    }
}

/// `min_i (δ‖x_newᵢ‖ − ‖x_newᵢ − x_oldᵢ‖)` over the seven quantities in the
/// discrete L²(Q_T) norm; the sweep has converged when this is `≥ 0`.
pub fn convergence_test(old: &IterateBundle, new: &IterateBundle, delta: f64) -> Result<f64> {
    if old.n_steps != new.n_steps
        || old.cells != new.cells
        || old.parts.iter().zip(&new.parts).any(|(a, b)| a.len() != b.len())
    {
        return Err(Error::Dimension("iterate bundles differ in shape".into()));
    }
    let mut worst = f64::INFINITY;
    for (a, b) in old.parts.iter().zip(&new.parts) {
        let size = new.norm_of(|k| b[k]);
        let change = new.norm_of(|k| b[k] - a[k]);
        worst = worst.min(delta * size - change);
    }
    Ok(worst)
}

/// Tolerance, relaxation and iteration cap of the sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub delta: f64,
    pub omega: f64,
    pub max_iter: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            delta: 1e-3,
            omega: 0.5,
            max_iter: 100,
        }
    }
}

impl SweepSettings {
    pub fn validate(&self) -> Result<()> {
        if !(self.delta.is_finite() && self.delta > 0.0) {
            return Err(Error::validation(
                "fbs.delta",
                format!("must be > 0, got {}", self.delta),
            ));
        }
        if !(self.omega > 0.0 && self.omega <= 1.0) {
            return Err(Error::validation(
                "fbs.omega",
                format!("must lie in (0, 1], got {}", self.omega),
            ));
        }
        if self.max_iter == 0 {
            return Err(Error::validation("fbs.max_iter", "must be >= 1"));
        }
        Ok(())
    }
}

/// Outcome of [`forward_backward_sweep`].
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub iterations: usize,
    /// `J` of the control entering each iteration.
    pub j_history: Vec<f64>,
    /// Value of the convergence test after each iteration.
    pub test_history: Vec<f64>,
    /// Cost of the final control.
    pub objective: Objective,
    pub converged: bool,
    /// Iterations where `J` rose by more than `1e-6 J₀`.
    pub non_monotone_steps: usize,
    pub clipped_mass: f64,
    pub control: ControlTrajectory,
    pub state: StateTrajectory,
    pub adjoint: AdjointTrajectory,
}

/// Forward-backward sweep starting from `u ≡ 0`.
pub fn forward_backward_sweep(problem: &Problem, settings: &SweepSettings) -> Result<SweepReport> {
    let initial = ControlTrajectory::zeros(problem.grid, problem.n_steps());
    forward_backward_sweep_from(problem, settings, initial)
}

/// Forward-backward sweep from a given initial control.
pub fn forward_backward_sweep_from(
    problem: &Problem,
    settings: &SweepSettings,
    initial: ControlTrajectory,
) -> Result<SweepReport> {
    settings.validate()?;
    let p = &problem.params;
    let mut u_old = initial;
    let mut old_bundle: Option<IterateBundle> = None;
    let mut j_history = Vec::new();
    let mut test_history = Vec::new();
    let mut converged = false;
    let mut non_monotone_steps = 0;
    let mut last_adjoint = None;
    let mut clipped_mass: f64 = 0.0;

    for iter in 1..=settings.max_iter {
        let traj = solve_forward(problem, &u_old)?;
        clipped_mass = clipped_mass.max(traj.clipped_mass());
        let j = evaluate_objective(&traj, &u_old, p)?.total;
        if let Some(&prev) = j_history.last() {
            if j > prev + 1e-6 * j_history[0] {
                non_monotone_steps += 1;
                log::warn!("iteration {iter}: cost rose from {prev:.6e} to {j:.6e}");
            }
        }
        j_history.push(j);
        let adj = solve_adjoint(problem, &traj, &u_old)?;
        let projected = project_control(&traj, &adj, p);
        let mixed: Vec<f64> = u_old
            .values()
            .iter()
            .zip(projected.values())
            .map(|(a, b)| ((1.0 - settings.omega) * a + settings.omega * b).clamp(0.0, 1.0))
            .collect();
        let u_new = ControlTrajectory::from_values(problem.grid, problem.n_steps(), mixed)?;
        let new_bundle = IterateBundle::new(&traj, &adj, &u_new);
        let reference = old_bundle
            .take()
            .unwrap_or_else(|| IterateBundle::zeros_like(&new_bundle));
        let test = convergence_test(&reference, &new_bundle, settings.delta)?;
        test_history.push(test);
        log::info!("iteration {iter}: J = {j:.6e}, test = {test:.3e}");
        old_bundle = Some(new_bundle);
        last_adjoint = Some(adj);
        u_old = u_new;
        if test >= 0.0 {
            converged = true;
            break;
        }
    }

    let state = solve_forward(problem, &u_old)?;
    clipped_mass = clipped_mass.max(state.clipped_mass());
    let objective = evaluate_objective(&state, &u_old, p)?;
    Ok(SweepReport {
        iterations: j_history.len(),
        j_history,
        test_history,
        objective,
        converged,
        non_monotone_steps,
        clipped_mass,
        control: u_old,
        state,
        adjoint: last_adjoint.expect("at least one iteration runs"),
    })
}

/// Adjoint and central-difference directional derivatives of `J` at `u` along `h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionalCheck {
    pub adjoint: f64,
    pub finite_difference: f64,
}

impl DirectionalCheck {
    pub fn relative_error(&self) -> f64 {
        let diff = (self.adjoint - self.finite_difference).abs();
        if diff == 0.0 {
            0.0
        } else {
            diff / self.finite_difference.abs().max(self.adjoint.abs())
        }
    }
}

/// `2⟨θu + G·p, h⟩` against `(J(u + εh) − J(u − εh)) / 2ε`.
pub fn check_direction(problem: &Problem, u: &ControlTrajectory, h: &[f64], epsilon: f64) -> Result<DirectionalCheck> {
    if h.len() != u.values().len() {
        return Err(Error::Dimension("direction and control differ in size".into()));
    }
    let p = &problem.params;
    let traj = solve_forward(problem, u)?;
    let adj = solve_adjoint(problem, &traj, u)?;
    let grad = gradient_density(&traj, &adj, u, p);
    let m = problem.n_steps();
    let cells = problem.grid.cells();
    let area = problem.grid.cell_area();
    let tau = problem.setup.tau;
    let mut adjoint = 0.0;
    for n in 0..=m {
        let w = 2.0 * area * tau * trapezoid_weight(n, m);
        adjoint += w * (n * cells..(n + 1) * cells).map(|k| grad[k] * h[k]).sum::<f64>();
    }
    let shifted = |sign: f64| -> Result<f64> {
        let v: Vec<f64> = u.values().iter().zip(h).map(|(a, b)| a + sign * epsilon * b).collect();
        let uc = ControlTrajectory::from_values(problem.grid, m, v)?;
        let t = solve_forward(problem, &uc)?;
        Ok(evaluate_objective(&t, &uc, p)?.total)
    };
    let finite_difference = (shifted(1.0)? - shifted(-1.0)?) / (2.0 * epsilon);
    Ok(DirectionalCheck {
        adjoint,
        finite_difference,
    })
}

/// Gradient check along `n_directions` random directions with entries in
/// `[−1, 1]`; `u` must keep a margin of `epsilon` from the bounds.
pub fn gradient_check(
    problem: &Problem,
    u: &ControlTrajectory,
    n_directions: usize,
    epsilon: f64,
    seed: u64,
) -> Result<Vec<DirectionalCheck>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_directions)
        .map(|_| {
            let h: Vec<f64> = (0..u.values().len()).map(|_| rng.gen_range(-1.0..=1.0)).collect();
            check_direction(problem, u, &h, epsilon)
        })
        .collect()
}
