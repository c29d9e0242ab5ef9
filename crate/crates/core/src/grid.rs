//! Uniform periodic grids on `[-L, L)^n` and real fields sampled on them.

use crate::error::{invalid, Error, Result};

/// A uniform periodic grid with `points` samples per axis on `[-L, L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    dim: usize,
    half_width: f64,
    points: usize,
}

impl Grid {
    pub fn new(dim: usize, half_width: f64, points: usize) -> Result<Self> {
        if dim < 1 {
            return Err(invalid("dim", "grid dimension must be at least 1"));
        }
        if !(half_width > 0.0) || !half_width.is_finite() {
            return Err(invalid("half_width", format!("must be positive, got {half_width}")));
        }
        if points < 2 || !points.is_power_of_two() {
            return Err(invalid(
                "points_per_axis",
                format!("must be a power of two >= 2, got {points}"),
            ));
        }
        if points.checked_pow(dim as u32).is_none() {
            return Err(invalid("points_per_axis", "grid too large"));
        }
        Ok(Self {
            dim,
            half_width,
            points,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn points_per_axis(&self) -> usize {
        self.points
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_width / self.points as f64
    }

    /// Total number of samples `N^n`.
    pub fn len(&self) -> usize {
        self.points.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn cell_volume(&self) -> f64 {
        self.spacing().powi(self.dim as i32)
    }

    pub fn volume(&self) -> f64 {
        (2.0 * self.half_width).powi(self.dim as i32)
    }

    /// Coordinate of axis index `j` (wrapped modulo `N`).
    pub fn coordinate(&self, j: isize) -> f64 {
        let n = self.points as isize;
        let j = j.rem_euclid(n);
        -self.half_width + j as f64 * self.spacing()
    }

    /// Axis indices of the flat index (axis 0 varies slowest).
    pub fn unravel(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.dim).rev() {
            out[a] = flat % self.points;
            flat /= self.points;
        }
    }

    pub fn ravel(&self, idx: &[usize]) -> usize {
        idx.iter().fold(0, |acc, &i| acc * self.points + i % self.points)
    }

    /// Flat index of the grid point at the origin.
    pub fn origin_index(&self) -> usize {
        let idx = vec![self.points / 2; self.dim];
        self.ravel(&idx)
    }

    pub fn point(&self, flat: usize, out: &mut [f64]) {
        let mut idx = vec![0usize; self.dim];
        self.unravel(flat, &mut idx);
        for (o, &i) in out.iter_mut().zip(&idx) {
            *o = self.coordinate(i as isize);
        }
    }

    pub fn radius(&self, flat: usize) -> f64 {
        let mut x = vec![0.0; self.dim];
        self.point(flat, &mut x);
        x.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Whether the flat index lies within one spacing of the box boundary.
    pub fn is_boundary(&self, flat: usize) -> bool {
        let mut idx = vec![0usize; self.dim];
        self.unravel(flat, &mut idx);
        idx.iter().any(|&i| i == 0 || i + 1 == self.points)
    }
}

/// Real-valued field on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    grid: Grid,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Domain(format!(
                "expected {} samples, got {}",
                grid.len(),
                values.len()
            )));
        }
        Ok(Self { grid, values })
    }

    pub fn zeros(grid: Grid) -> Self {
        Self::constant(grid, 0.0)
    }

    pub fn constant(grid: Grid, c: f64) -> Self {
        Self {
            grid,
            values: vec![c; grid.len()],
        }
    }

    pub fn from_fn(grid: Grid, mut f: impl FnMut(&[f64]) -> f64) -> Self {
        let mut x = vec![0.0; grid.dim()];
        let values = (0..grid.len())
            .map(|i| {
                grid.point(i, &mut x);
                f(&x)
            })
            .collect();
        Self { grid, values }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
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

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            grid: self.grid,
            values: self.values.iter().map(|&v| f(v)).collect(),
        }
    }

    /// `self += scale * other`
    pub fn add_scaled(&mut self, scale: f64, other: &GridFunction) {
        debug_assert_eq!(self.grid, other.grid);
        for (a, b) in self.values.iter_mut().zip(&other.values) {
            *a += scale * b;
        }
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// Flat index of the largest `|u|` (first occurrence).
    pub fn argmax_abs(&self) -> usize {
        let mut best = 0;
        for (i, v) in self.values.iter().enumerate() {
            if v.abs() > self.values[best].abs() {
                best = i;
            }
        }
        best
    }

    /// Riemann-sum integral `Σ u · h^n`.
    pub fn integral(&self) -> f64 {
        self.values.iter().sum::<f64>() * self.grid.cell_volume()
    }

    /// Riemann-sum `L^r` norm, `r ∈ [1, ∞]`.
    pub fn lp_norm(&self, r: f64) -> Result<f64> {
        if r.is_nan() || r < 1.0 {
            return Err(Error::Domain(format!("norm exponent must be >= 1, got {r}")));
        }
        if r.is_infinite() {
            return Ok(self.sup_norm());
        }
        let h = self.grid.cell_volume();
        // scale by the sup to keep |u|^r in range
        let s = self.sup_norm();
        if s == 0.0 {
            return Ok(0.0);
        }
        let sum: f64 = self.values.iter().map(|v| (v.abs() / s).powf(r)).sum();
        Ok(s * (sum * h).powf(1.0 / r))
    }

    /// Largest `|u|` within one spacing of the box boundary.
    pub fn boundary_sup(&self) -> f64 {
        (0..self.grid.len())
            .filter(|&i| self.grid.is_boundary(i))
            .fold(0.0, |m, i| m.max(self.values[i].abs()))
    }
}
