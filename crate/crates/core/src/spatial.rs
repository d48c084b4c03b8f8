//! Cell-centered 2D grid, per-cell scalar fields, and the Neumann Laplacian.
//!
//! Cells are stored row-major with row 0 at the bottom: `cell(1,1)` in the
//! one-based notation of the scenario files is index `(0, 0)`, the lower-left
//! corner.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub nx: usize,
    pub ny: usize,
    /// Cell width (km).
    pub h: f64,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, h: f64) -> Result<Self> {
        if nx == 0 || ny == 0 {
            return Err(Error::Domain(format!("grid needs at least one cell, got {nx}x{ny}")));
        }
        if !(h.is_finite() && h > 0.0) {
            return Err(Error::Domain(format!("cell width must be positive, got {h}")));
        }
        Ok(Grid2D { nx, ny, h })
    }

    pub fn cells(&self) -> usize {
        self.nx * self.ny
    }

    /// Flat index of column `i`, row `j` (both zero-based, row 0 at the bottom).
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.nx + i
    }

    pub fn cell_area(&self) -> f64 {
        self.h * self.h
    }
}

/// A scalar value per grid cell.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid2D,
    values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Grid2D) -> Self {
        Field::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid2D, c: f64) -> Self {
        Field {
            grid,
            values: vec![c; grid.cells()],
        }
    }

    pub fn from_values(grid: Grid2D, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.cells() {
            return Err(Error::Dimension(format!(
                "field has {} values for a {}x{} grid",
                values.len(),
                grid.nx,
                grid.ny
            )));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("field values must be finite, found {v}")));
        }
        Ok(Field { grid, values })
    }

    pub fn grid(&self) -> Grid2D {
        self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[self.grid.index(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        let k = self.grid.index(i, j);
        self.values[k] = v;
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Midpoint-rule integral `Σ f h²`.
    pub fn integrate(&self) -> f64 {
        integrate_field(self)
    }

    /// `Σ f² h²`.
    pub fn squared_norm(&self) -> f64 {
        squared_norm(self)
    }
}

/// Midpoint-rule integral of a field over the domain.
pub fn integrate_field(f: &Field) -> f64 {
    f.values.iter().sum::<f64>() * f.grid.cell_area()
}

/// Discrete squared L² norm `Σ f² h²`.
pub fn squared_norm(f: &Field) -> f64 {
    f.values.iter().map(|v| v * v).sum::<f64>() * f.grid.cell_area()
}

/// 5-point Laplacian with mirrored ghost cells (zero normal flux).
pub fn laplacian_neumann(f: &Field) -> Field {
    let mut out = vec![0.0; f.values.len()];
    laplacian_into(f.grid, &f.values, &mut out);
    Field {
        grid: f.grid,
        values: out,
    }
}

/// Slice form of [`laplacian_neumann`], writing into `out`.
pub(crate) fn laplacian_into(grid: Grid2D, f: &[f64], out: &mut [f64]) {
    let Grid2D { nx, ny, h } = grid;
    let inv_h2 = 1.0 / (h * h);
    for j in 0..ny {
        for i in 0..nx {
            let c = f[j * nx + i];
            // a mirrored ghost equals the boundary cell, so that neighbour contributes zero
            let mut acc = 0.0;
            if i > 0 {
                acc += f[j * nx + i - 1] - c;
            }
            if i + 1 < nx {
                acc += f[j * nx + i + 1] - c;
            }
            if j > 0 {
                acc += f[(j - 1) * nx + i] - c;
            }
            if j + 1 < ny {
                acc += f[(j + 1) * nx + i] - c;
            }
            out[j * nx + i] = acc * inv_h2;
        }
    }
}

/// Solves `(diag − λΔ) x = b` under Neumann conditions by Jacobi-preconditioned
/// conjugate gradients. `diag` must be positive; `x` holds the result.
pub(crate) fn solve_shifted(grid: Grid2D, diag: &[f64], lambda: f64, b: &[f64], x: &mut [f64]) -> Result<()> {
    let n = b.len();
    if lambda == 0.0 || n == 1 {
        for k in 0..n {
            x[k] = b[k] / diag[k];
        }
        return Ok(());
    }
    let Grid2D { nx, ny, h } = grid;
    let coupling = lambda / (h * h);
    let precond: Vec<f64> = (0..n)
        .map(|k| {
            let (i, j) = (k % nx, k / nx);
            let neighbours = (i > 0) as u8 + (i + 1 < nx) as u8 + (j > 0) as u8 + (j + 1 < ny) as u8;
            1.0 / (diag[k] + coupling * neighbours as f64)
        })
        .collect();
    let apply = |v: &[f64], out: &mut [f64]| {
        laplacian_into(grid, v, out);
        for k in 0..n {
            out[k] = diag[k] * v[k] - lambda * out[k];
        }
    };
    let b_norm = b.iter().map(|v| v * v).sum::<f64>().sqrt();
    if b_norm == 0.0 {
        x.iter_mut().for_each(|v| *v = 0.0);
        return Ok(());
    }
    for k in 0..n {
        x[k] = b[k] * precond[k];
    }
    let mut ax = vec![0.0; n];
    apply(x, &mut ax);
    let mut res: Vec<f64> = (0..n).map(|k| b[k] - ax[k]).collect();
    let mut z: Vec<f64> = (0..n).map(|k| res[k] * precond[k]).collect();
    let mut dir = z.clone();
    let mut rz: f64 = res.iter().zip(&z).map(|(a, c)| a * c).sum();
    let tol = 1e-14 * b_norm;
    for _ in 0..10 * n + 50 {
        if res.iter().map(|v| v * v).sum::<f64>().sqrt() <= tol {
            return Ok(());
        }
        apply(&dir, &mut ax);
        let step = rz / dir.iter().zip(&ax).map(|(a, c)| a * c).sum::<f64>();
        for k in 0..n {
            x[k] += step * dir[k];
            res[k] -= step * ax[k];
            z[k] = res[k] * precond[k];
        }
        let rz_next: f64 = res.iter().zip(&z).map(|(a, c)| a * c).sum();
        let ratio = rz_next / rz;
        rz = rz_next;
        for k in 0..n {
            dir[k] = z[k] + ratio * dir[k];
        }
    }
    if res.iter().map(|v| v * v).sum::<f64>().sqrt() <= 1e-10 * b_norm {
        return Ok(());
    }
    Err(Error::Accuracy("diffusion solve did not converge".into()))
}
