//! JSON scenario files: defaults, validation and conversion into a [`Problem`].
//!
//! Every field is optional; `{}` is the default outbreak on a 10×10 grid of
//! 1 km cells, 50 susceptibles per km² and 7 infected people in the lower-left
//! cell.

use crate::error::{Error, Result};
use crate::forward::{Problem, SolverOptions};
use crate::fractional::FractionalSetup;
use crate::model::{ModelParams, SirState};
use crate::optimizer::SweepSettings;
use crate::spatial::{Field, Grid2D};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    /// Fractional order in (0, 1).
    pub alpha: f64,
    pub grid: GridConfig,
    pub time: TimeConfig,
    pub params: ModelParams,
    pub initial: InitialConfig,
    /// Whether `optimize` may vaccinate at all.
    pub control_enabled: bool,
    pub fbs: SweepSettings,
    pub outputs: OutputConfig,
    pub solver: SolverOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    pub nx: usize,
    pub ny: usize,
    /// Cell width (km).
    pub h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeConfig {
    /// Horizon (days).
    pub t_final: f64,
    /// Step (days).
    pub tau: f64,
}

/// Densities of one compartment triple (people/km²).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Densities {
    pub s: f64,
    pub i: f64,
    pub r: f64,
}

/// A rectangle of cells, one-based and inclusive; `[1, 1]` is the lower-left cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub columns: [usize; 2],
    pub rows: [usize; 2],
    /// Values replacing the background; missing ones keep it.
    #[serde(default)]
    pub s: Option<f64>,
    #[serde(default)]
    pub i: Option<f64>,
    #[serde(default)]
    pub r: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InitialConfig {
    pub background: Densities,
    /// Applied in order; later regions win.
    pub regions: Vec<Region>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Days at which field snapshots are written.
    pub snapshot_times: Vec<f64>,
    pub directory: String,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            alpha: 0.95,
            grid: GridConfig::default(),
            time: TimeConfig::default(),
            params: ModelParams::default(),
            initial: InitialConfig::default(),
            control_enabled: true,
            fbs: SweepSettings::default(),
            outputs: OutputConfig::default(),
            solver: SolverOptions::default(),
        }
    }
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig { nx: 10, ny: 10, h: 1.0 }
    }
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig {
            t_final: 20.0,
            tau: 0.005,
        }
    }
}

impl Default for Densities {
    fn default() -> Self {
        Densities {
            s: 50.0,
            i: 0.0,
            r: 0.0,
        }
    }
}

impl Default for InitialConfig {
    fn default() -> Self {
        InitialConfig {
            background: Densities::default(),
            regions: vec![Region {
                columns: [1, 1],
                rows: [1, 1],
                s: Some(43.0),
                i: Some(7.0),
                r: Some(0.0),
            }],
        }
    }
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            snapshot_times: vec![5.0, 10.0, 15.0, 20.0],
            directory: "output".into(),
        }
    }
}

/// Parses and validates a scenario document.
pub fn load_config(text: &str) -> Result<ScenarioConfig> {
    let config: ScenarioConfig = serde_json::from_str(text).map_err(|e| Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    })?;
    config.validate()?;
    Ok(config)
}

fn check_density(field: &str, v: f64) -> Result<()> {
    if !(v.is_finite() && v >= 0.0) {
        return Err(Error::validation(field, format!("must be finite and >= 0, got {v}")));
    }
    Ok(())
}

impl ScenarioConfig {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::validation(
                "alpha",
                format!("must lie in (0, 1), got {}", self.alpha),
            ));
        }
        let g = self.grid;
        if g.nx == 0 {
            return Err(Error::validation("grid.nx", "must be >= 1"));
        }
        if g.ny == 0 {
            return Err(Error::validation("grid.ny", "must be >= 1"));
        }
        if !(g.h.is_finite() && g.h > 0.0) {
            return Err(Error::validation("grid.h", format!("must be > 0, got {}", g.h)));
        }
        let t = self.time;
        if !(t.t_final.is_finite() && t.t_final > 0.0) {
            return Err(Error::validation(
                "time.t_final",
                format!("must be > 0, got {}", t.t_final),
            ));
        }
        if !(t.tau.is_finite() && t.tau > 0.0) {
            return Err(Error::validation("time.tau", format!("must be > 0, got {}", t.tau)));
        }
        self.params.validate()?;
        let lambda = self.params.max_diffusion();
        if lambda > 0.0 {
            let bound = g.h * g.h / (4.0 * lambda);
            if t.tau > bound {
                return Err(Error::validation(
                    "time.tau",
                    format!("{} exceeds the diffusion stability bound h²/(4 max λ) = {bound}", t.tau),
                ));
            }
        }
        let ratio = t.t_final / t.tau;
        if (ratio - ratio.round()).abs() > 1e-9 * ratio.max(1.0) || ratio.round() < 1.0 {
            return Err(Error::validation(
                "time.t_final",
                format!("must be a whole number of steps of {}, got {} steps", t.tau, ratio),
            ));
        }
        let b = self.initial.background;
        check_density("initial.background.s", b.s)?;
        check_density("initial.background.i", b.i)?;
        check_density("initial.background.r", b.r)?;
        for (k, region) in self.initial.regions.iter().enumerate() {
            let [c0, c1] = region.columns;
            let [r0, r1] = region.rows;
            if c0 == 0 || c0 > c1 || c1 > g.nx {
                return Err(Error::validation(
                    &format!("initial.regions[{k}].columns"),
                    format!("[{c0}, {c1}] is not a range inside 1..={}", g.nx),
                ));
            }
            if r0 == 0 || r0 > r1 || r1 > g.ny {
                return Err(Error::validation(
                    &format!("initial.regions[{k}].rows"),
                    format!("[{r0}, {r1}] is not a range inside 1..={}", g.ny),
                ));
            }
            for (name, v) in [("s", region.s), ("i", region.i), ("r", region.r)] {
                if let Some(v) = v {
                    check_density(&format!("initial.regions[{k}].{name}"), v)?;
                }
            }
        }
        self.fbs.validate()?;
        for &s in &self.outputs.snapshot_times {
            if !(s.is_finite() && s >= 0.0 && s <= t.t_final + 1e-9) {
                return Err(Error::validation(
                    "outputs.snapshot_times",
                    format!("{s} is outside [0, {}]", t.t_final),
                ));
            }
        }
        let o = self.solver;
        if !(o.instability_bound.is_finite() && o.instability_bound > 0.0) {
            return Err(Error::validation("solver.instability_bound", "must be > 0"));
        }
        if !(o.max_clip_fraction.is_finite() && o.max_clip_fraction >= 0.0) {
            return Err(Error::validation("solver.max_clip_fraction", "must be >= 0"));
        }
        if o.memory_window == Some(0) {
            return Err(Error::validation("solver.memory_window", "must be >= 1"));
        }
        Ok(())
    }

    pub fn n_steps(&self) -> usize {
        (self.time.t_final / self.time.tau).round() as usize
    }

    pub fn grid(&self) -> Result<Grid2D> {
        Grid2D::new(self.grid.nx, self.grid.ny, self.grid.h)
    }

    pub fn initial_state(&self) -> Result<SirState> {
        let grid = self.grid()?;
        let b = self.initial.background;
        let mut s = Field::constant(grid, b.s);
        let mut i = Field::constant(grid, b.i);
        let mut r = Field::constant(grid, b.r);
        for region in &self.initial.regions {
            for row in region.rows[0]..=region.rows[1] {
                for col in region.columns[0]..=region.columns[1] {
                    let (x, y) = (col - 1, row - 1);
                    for (field, v) in [(&mut s, region.s), (&mut i, region.i), (&mut r, region.r)] {
                        if let Some(v) = v {
                            field.set(x, y, v);
                        }
                    }
                }
            }
        }
        SirState::new(s, i, r)
    }

    /// Validates the config and assembles the solver input.
    pub fn build_problem(&self) -> Result<Problem> {
        self.validate()?;
        let setup = FractionalSetup::new(self.alpha, self.time.tau, self.n_steps())?;
        Problem::new(setup, self.params, self.initial_state()?, self.solver)
    }

    /// Time indices of the requested snapshots.
    pub fn snapshot_indices(&self) -> Vec<usize> {
        let m = self.n_steps();
        self.outputs
            .snapshot_times
            .iter()
            .map(|t| ((t / self.time.tau).round() as usize).min(m))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_the_default_outbreak() {
        let c = load_config("{}").unwrap();
        assert_eq!(c, ScenarioConfig::default());
        assert_eq!(c.alpha, 0.95);
        assert_eq!(c.n_steps(), 4000);
        let st = c.initial_state().unwrap();
        assert_eq!(st.s.get(0, 0), 43.0);
        assert_eq!(st.i.get(0, 0), 7.0);
        assert_eq!(st.s.get(9, 9), 50.0);
        assert_eq!(st.i.get(1, 0), 0.0);
        assert_eq!(st.population(), 50.0 * 100.0);
        assert_eq!(c.snapshot_indices(), vec![1000, 2000, 3000, 4000]);
    }

    #[test]
    fn round_trip() {
        let text = r#"{"alpha": 0.9, "grid": {"nx": 6}, "time": {"tau": 0.02},
            "initial": {"regions": [{"columns": [2, 3], "rows": [1, 2], "i": 1.5}]},
            "solver": {"memory_window": 400}}"#;
        let c = load_config(text).unwrap();
        assert_eq!(c.grid.nx, 6);
        assert_eq!(c.grid.ny, 10);
        let again = load_config(&c.to_json()).unwrap();
        assert_eq!(again, c);
        let st = c.initial_state().unwrap();
        assert_eq!(st.i.get(1, 0), 1.5);
        assert_eq!(st.i.get(2, 1), 1.5);
        assert_eq!(st.s.get(1, 0), 50.0);
        assert_eq!(st.i.get(0, 0), 0.0);
    }

    #[test]
    fn unstable_step_is_rejected() {
        let err = load_config(r#"{"time": {"tau": 1.0}}"#).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "time.tau"),
            "{err}"
        );
    }

    #[test]
    fn fractional_step_count_is_rejected() {
        let err = load_config(r#"{"time": {"t_final": 1.0, "tau": 0.3}}"#).unwrap_err();
        assert!(
            matches!(err, Error::Validation { ref field, .. } if field == "time.t_final"),
            "{err}"
        );
    }

    #[test]
    fn parse_errors_carry_position() {
        let err = load_config("{\n  \"alpha\": 0.9,\n  \"grid\": [\n}").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err:?}");
        let err = load_config(r#"{"alhpa": 0.9}"#).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err:?}");
        assert!(err.to_string().contains("alhpa"));
    }

    #[test]
    fn invariants_name_their_field() {
        let cases = [
            (r#"{"alpha": 1.0}"#, "alpha"),
            (r#"{"grid": {"nx": 0}}"#, "grid.nx"),
            (r#"{"params": {"beta": -1}}"#, "params.beta"),
            (r#"{"initial": {"background": {"s": -1}}}"#, "initial.background.s"),
            (
                r#"{"initial": {"regions": [{"columns": [1, 11], "rows": [1, 1]}]}}"#,
                "initial.regions[0].columns",
            ),
            (
                r#"{"initial": {"regions": [{"columns": [1, 1], "rows": [1, 1], "i": -2}]}}"#,
                "initial.regions[0].i",
            ),
            (r#"{"outputs": {"snapshot_times": [25]}}"#, "outputs.snapshot_times"),
            (r#"{"fbs": {"omega": 0}}"#, "fbs.omega"),
            (r#"{"solver": {"memory_window": 0}}"#, "solver.memory_window"),
        ];
        for (text, expected) in cases {
            match load_config(text) {
                Err(Error::Validation { field, .. }) => assert_eq!(field, expected, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn builds_a_problem() {
        let c = load_config(
            r#"{"grid": {"nx": 3, "ny": 2}, "time": {"t_final": 1, "tau": 0.1}, "outputs": {"snapshot_times": [1]}}"#,
        )
        .unwrap();
        let p = c.build_problem().unwrap();
        assert_eq!(p.n_steps(), 10);
        assert_eq!(p.grid.cells(), 6);
        assert_eq!(p.setup.alpha, 0.95);
    }
}
