//! The polyharmonic semigroup `S(t) = exp(-(-Δ)^m t)` on a periodic grid.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::quadrature::fit_line;

/// Symbol `|w|^{2m}` on the discrete frequency lattice `w = π k / L`, `k ∈ [-N/2, N/2)`,
/// stored in transform order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymbolTable {
    grid: Grid,
    m: usize,
    values: Vec<f64>,
}

/// Signed integer wavenumber of transform index `j`.
fn wavenumber(j: usize, n: usize) -> isize {
    if j < n / 2 {
        j as isize
    } else {
        j as isize - n as isize
    }
}

impl SymbolTable {
    pub fn new(grid: Grid, m: usize) -> Result<Self> {
        if m < 1 {
            return Err(Error::Domain("polyharmonic order must be at least 1".into()));
        }
        let n = grid.points_per_axis();
        let scale = std::f64::consts::PI / grid.half_width();
        let mut idx = vec![0usize; grid.dim()];
        let values = (0..grid.len())
            .map(|flat| {
                grid.unravel(flat, &mut idx);
                let w2: f64 = idx
                    .iter()
                    .map(|&j| {
                        let w = scale * wavenumber(j, n) as f64;
                        w * w
                    })
                    .sum();
                w2.powi(m as i32)
            })
            .collect();
        Ok(Self { grid, m, values })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn order(&self) -> usize {
        self.m
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Whether transform index `flat` lies in the upper third of the spectrum on some axis.
    fn is_tail(&self, flat: usize, idx: &mut [usize]) -> bool {
        let n = self.grid.points_per_axis();
        self.grid.unravel(flat, idx);
        idx.iter()
            .any(|&j| 3 * wavenumber(j, n).unsigned_abs() > n)
    }
}

/// Precomputed symbol and transform plans for repeated semigroup application.
#[derive(Clone)]
pub struct Semigroup {
    symbol: SymbolTable,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Semigroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Semigroup")
            .field("grid", &self.symbol.grid)
            .field("m", &self.symbol.m)
            .finish()
    }
}

impl Semigroup {
    pub fn new(grid: Grid, m: usize) -> Result<Self> {
        let symbol = SymbolTable::new(grid, m)?;
        let mut planner = FftPlanner::new();
        let n = grid.points_per_axis();
        Ok(Self {
            symbol,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        })
    }

    pub fn symbol(&self) -> &SymbolTable {
        &self.symbol
    }

    pub fn grid(&self) -> &Grid {
        &self.symbol.grid
    }

    fn transform(&self, data: &mut [Complex64], fft: &Arc<dyn Fft<f64>>) {
        let grid = self.symbol.grid;
        let n = grid.points_per_axis();
        let dim = grid.dim();
        if dim == 1 {
            fft.process(data);
            return;
        }
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            let block = stride * n;
            for start in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let base = start + offset;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + k * stride];
                    }
                    fft.process(&mut line);
                    for (k, v) in line.iter().enumerate() {
                        data[base + k * stride] = *v;
                    }
                }
            }
        }
    }

    fn spectrum(&self, f: &GridFunction) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = f.values().iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    fn tail_of(&self, spec: &[Complex64]) -> f64 {
        let mut idx = vec![0usize; self.symbol.grid.dim()];
        let mut total = 0.0;
        let mut tail = 0.0;
        for (flat, c) in spec.iter().enumerate() {
            let e = c.norm_sqr();
            total += e;
            if self.symbol.is_tail(flat, &mut idx) {
                tail += e;
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }

    /// Applies `S(t)`, returning the result and the energy fraction of the result
    /// carried by the upper third of the spectrum.
    pub fn apply_diagnosed(&self, f: &GridFunction, t: f64) -> Result<(GridFunction, f64)> {
        if !(t >= 0.0) || !t.is_finite() {
            return Err(Error::Domain(format!("semigroup time must be >= 0, got {t}")));
        }
        if f.grid() != self.grid() {
            return Err(Error::Domain("field and semigroup live on different grids".into()));
        }
        let mut spec = self.spectrum(f);
        if t > 0.0 {
            for (c, s) in spec.iter_mut().zip(&self.symbol.values) {
                *c *= (-s * t).exp();
            }
        }
        let tail = self.tail_of(&spec);
        self.transform(&mut spec, &self.inverse);
        let scale = 1.0 / self.grid().len() as f64;
        let values = spec.iter().map(|c| c.re * scale).collect();
        Ok((GridFunction::new(*self.grid(), values)?, tail))
    }

    pub fn apply(&self, f: &GridFunction, t: f64) -> Result<GridFunction> {
        self.apply_diagnosed(f, t).map(|(u, _)| u)
    }

    /// Energy fraction of `f` in modes with `|k| > N/3` on some axis.
    pub fn tail_fraction(&self, f: &GridFunction) -> f64 {
        self.tail_of(&self.spectrum(f))
    }

    /// `b(t, ·)`: the semigroup applied to a unit-mass discrete delta at the origin.
    pub fn kernel(&self, t: f64) -> Result<GridFunction> {
        if !(t > 0.0) {
            return Err(Error::Domain(format!("kernel time must be > 0, got {t}")));
        }
        let grid = *self.grid();
        let mut delta = GridFunction::zeros(grid);
        delta.values_mut()[grid.origin_index()] = 1.0 / grid.cell_volume();
        self.apply(&delta, t)
    }
}

/// One-shot `S(t) f`.
pub fn apply_semigroup(f: &GridFunction, m: usize, t: f64) -> Result<GridFunction> {
    Semigroup::new(*f.grid(), m)?.apply(f, t)
}

/// Samples of the fundamental solution `b(t, ·)` on the grid.
pub fn kernel_slice(grid: &Grid, m: usize, t: f64) -> Result<GridFunction> {
    Semigroup::new(*grid, m)?.kernel(t)
}

/// Fitted and predicted decay exponents of `‖S(t)φ‖_{r_out} / ‖φ‖_{r_in}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub slope: f64,
    pub predicted: f64,
    pub residual: f64,
}

/// Log-log slope of `‖S(t)φ_t‖_{r_out} / ‖φ_t‖_{r_in}` against `t`.
///
/// `φ_t` is a Gaussian of width `max(4h, t^{1/(2m)})`: at least four spacings so the lattice
/// does not ring, and otherwise on the diffusive scale so the ratio is scale invariant up to
/// the power of `t` being measured.
pub fn decay_slope_probe(grid: &Grid, m: usize, r_in: f64, r_out: f64, times: &[f64]) -> Result<DecayFit> {
    if !(r_in >= 1.0 && r_out >= r_in) {
        return Err(Error::Domain(format!(
            "need 1 <= r_in <= r_out, got r_in = {r_in}, r_out = {r_out}"
        )));
    }
    if times.len() < 4 {
        return Err(Error::WindowTooShort { got: times.len(), need: 4 });
    }
    if times.iter().any(|&t| !(t > 0.0)) {
        return Err(Error::Domain("probe times must be positive".into()));
    }
    let sg = Semigroup::new(*grid, m)?;
    let h = grid.spacing();
    let mut xs = Vec::with_capacity(times.len());
    let mut ys = Vec::with_capacity(times.len());
    for &t in times {
        let w = (4.0 * h).max(t.powf(0.5 / m as f64));
        let phi = GridFunction::from_fn(*grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            (-0.5 * r2 / (w * w)).exp()
        });
        let out = sg.apply(&phi, t)?;
        let ratio = out.lp_norm(r_out)? / phi.lp_norm(r_in)?;
        xs.push(t.ln());
        ys.push(ratio.ln());
    }
    let fit = fit_line(&xs, &ys)?;
    let inv = |r: f64| if r.is_infinite() { 0.0 } else { 1.0 / r };
    Ok(DecayFit {
        slope: fit.slope,
        predicted: -(grid.dim() as f64) / (2.0 * m as f64) * (inv(r_in) - inv(r_out)),
        residual: fit.residual,
    })
}
