//! Run artifacts: PGM heatmaps, CSV dumps and the JSON summary.

use crate::error::{Error, Result};
use crate::forward::{ControlTrajectory, StateTrajectory};
use crate::model::ModelParams;
use crate::optimizer::{running_objective, Objective};
use crate::scenario::ScenarioConfig;
use crate::spatial::Field;
use serde::Serialize;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

/// ASCII (P2) greymap, top row first, `round(255 · clamp((f − lo)/(hi − lo), 0, 1))`
/// with halves rounded up.
pub fn render_heatmap(f: &Field, lo: f64, hi: f64) -> Result<String> {
    if !(lo.is_finite() && hi.is_finite() && lo < hi) {
        return Err(Error::Domain(format!("heatmap range [{lo}, {hi}] is empty")));
    }
    let g = f.grid();
    let mut out = format!("P2\n{} {}\n255\n", g.nx, g.ny);
    for j in (0..g.ny).rev() {
        let row: Vec<String> = (0..g.nx)
            .map(|i| {
                let x = ((f.get(i, j) - lo) / (hi - lo)).clamp(0.0, 1.0);
                ((255.0 * x + 0.5).floor() as u8).to_string()
            })
            .collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    Ok(out)
}

/// One CSV line per grid row, top row first like the heatmaps.
pub fn field_csv(f: &Field) -> String {
    let g = f.grid();
    let mut out = String::new();
    for j in (0..g.ny).rev() {
        let row: Vec<String> = (0..g.nx).map(|i| f.get(i, j).to_string()).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Spatial totals per time index plus the running cost.
pub fn timeseries_csv(traj: &StateTrajectory, u: &ControlTrajectory, p: &ModelParams) -> Result<String> {
    let running = running_objective(traj, u, p)?;
    let area = traj.grid().cell_area();
    let mut out = String::from("t,total_S,total_I,total_R,max_I,J_running\n");
    for (n, j) in running.iter().enumerate() {
        let total = |v: &[f64]| v.iter().sum::<f64>() * area;
        let max_i = traj.i(n).iter().copied().fold(0.0, f64::max);
        writeln!(
            out,
            "{},{},{},{},{},{}",
            traj.time(n),
            total(traj.s(n)),
            total(traj.i(n)),
            total(traj.r(n)),
            max_i,
            j
        )
        .expect("writing to a String");
    }
    Ok(out)
}

/// Infection level in the cell opposite the lower-left corner.
pub fn far_corner_infection(traj: &StateTrajectory, n: usize) -> f64 {
    let g = traj.grid();
    traj.i(n)[g.index(g.nx - 1, g.ny - 1)]
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorReport {
    pub kind: String,
    pub message: String,
}

/// Contents of `summary.json`. Only `wall_clock_seconds` varies between
/// identical runs.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    /// `ok`, `not_converged` or `failed`.
    pub status: String,
    pub command: String,
    /// Order actually used.
    pub alpha: f64,
    /// Order asked for on the command line, when it had to be mapped.
    pub alpha_requested: Option<f64>,
    pub objective: Option<Objective>,
    /// Cost without vaccination, for comparison.
    pub j_uncontrolled: Option<f64>,
    pub iterations: usize,
    pub converged: Option<bool>,
    pub j_history: Vec<f64>,
    pub clipped_mass: f64,
    pub final_total_s: Option<f64>,
    pub final_total_i: Option<f64>,
    pub final_total_r: Option<f64>,
    pub final_far_corner_i: Option<f64>,
    pub error: Option<ErrorReport>,
    pub wall_clock_seconds: f64,
    pub config: ScenarioConfig,
}

impl RunSummary {
    pub fn new(command: &str, config: &ScenarioConfig, alpha_requested: Option<f64>) -> Self {
        RunSummary {
            status: "ok".into(),
            command: command.into(),
            alpha: config.alpha,
            alpha_requested,
            objective: None,
            j_uncontrolled: None,
            iterations: 0,
            converged: None,
            j_history: Vec::new(),
            clipped_mass: 0.0,
            final_total_s: None,
            final_total_i: None,
            final_total_r: None,
            final_far_corner_i: None,
            error: None,
            wall_clock_seconds: 0.0,
            config: config.clone(),
        }
    }

    /// Fills the end-of-run totals from a trajectory.
    pub fn record_final_state(&mut self, traj: &StateTrajectory) {
        let m = traj.n_steps();
        let area = traj.grid().cell_area();
        let total = |v: &[f64]| v.iter().sum::<f64>() * area;
        self.final_total_s = Some(total(traj.s(m)));
        self.final_total_i = Some(total(traj.i(m)));
        self.final_total_r = Some(total(traj.r(m)));
        self.final_far_corner_i = Some(far_corner_infection(traj, m));
        self.clipped_mass = self.clipped_mass.max(traj.clipped_mass());
    }

    pub fn record_error(&mut self, e: &Error) {
        self.status = "failed".into();
        self.error = Some(ErrorReport {
            kind: e.kind().into(),
            message: e.to_string(),
        });
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("summary serializes");
        s.push('\n');
        s
    }
}

fn write(path: PathBuf, contents: &str, written: &mut Vec<PathBuf>) -> Result<()> {
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    written.push(path);
    Ok(())
}

fn create_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

pub fn write_summary(dir: &Path, summary: &RunSummary) -> Result<PathBuf> {
    create_dir(dir)?;
    let mut written = Vec::new();
    write(dir.join("summary.json"), &summary.to_json(), &mut written)?;
    Ok(written.remove(0))
}

/// Writes `timeseries.csv` and `snapshots/{S,I,R,u}_tDDD.DD.{pgm,csv}`.
/// Compartment heatmaps share one scale per compartment across snapshots; the
/// control is drawn on `[0, 1]` when `draw_control` is set.
pub fn write_trajectory_artifacts(
    dir: &Path,
    traj: &StateTrajectory,
    u: &ControlTrajectory,
    params: &ModelParams,
    snapshots: &[usize],
    draw_control: bool,
) -> Result<Vec<PathBuf>> {
    create_dir(dir)?;
    let mut written = Vec::new();
    write(
        dir.join("timeseries.csv"),
        &timeseries_csv(traj, u, params)?,
        &mut written,
    )?;
    let snap_dir = dir.join("snapshots");
    create_dir(&snap_dir)?;
    for (comp, name) in ["S", "I", "R"].iter().enumerate() {
        let hi = snapshots
            .iter()
            .flat_map(|&n| traj.component(n, comp).iter().copied())
            .fold(0.0, f64::max);
        let hi = if hi > 0.0 { hi } else { 1.0 };
        for &n in snapshots {
            let field = traj.state(n).components()[comp].clone();
            let stem = format!("{name}_t{:06.2}", traj.time(n));
            write(
                snap_dir.join(format!("{stem}.pgm")),
                &render_heatmap(&field, 0.0, hi)?,
                &mut written,
            )?;
            write(snap_dir.join(format!("{stem}.csv")), &field_csv(&field), &mut written)?;
        }
    }
    if draw_control {
        for &n in snapshots {
            let field = u.field(n);
            let stem = format!("u_t{:06.2}", traj.time(n));
            write(
                snap_dir.join(format!("{stem}.pgm")),
                &render_heatmap(&field, 0.0, 1.0)?,
                &mut written,
            )?;
            write(snap_dir.join(format!("{stem}.csv")), &field_csv(&field), &mut written)?;
        }
    }
    Ok(written)
}
