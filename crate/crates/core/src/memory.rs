//! History of `|u|^p` and the singular memory integral `∫_0^t (t-s)^{-γ} g(s) ds`.

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::quadrature::linear_product_weights;

/// Time-stamped snapshots `g(t_j)` of the memory integrand.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryLedger {
    grid: Grid,
    gamma: f64,
    stamps: Vec<f64>,
    snapshots: Vec<GridFunction>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrimPolicy {
    KeepAll,
    /// Drop an interior stamp when its merged interval is at most `1/ratio` of its age.
    CoarsenTail { ratio: f64 },
}

impl MemoryLedger {
    pub fn new(grid: Grid, gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::Domain(format!("gamma must lie in (0,1), got {gamma}")));
        }
        Ok(Self {
            grid,
            gamma,
            stamps: Vec::new(),
            snapshots: Vec::new(),
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn len(&self) -> usize {
        self.stamps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stamps.is_empty()
    }

    pub fn stamps(&self) -> &[f64] {
        &self.stamps
    }

    pub fn snapshots(&self) -> &[GridFunction] {
        &self.snapshots
    }

    pub fn last_time(&self) -> Option<f64> {
        self.stamps.last().copied()
    }

    /// Appends a snapshot of the integrand itself.
    pub fn push(&mut self, t: f64, g: GridFunction) -> Result<()> {
        if g.grid() != &self.grid {
            return Err(Error::Domain("snapshot lives on a different grid".into()));
        }
        if let Some(last) = self.last_time() {
            if !(t > last) {
                return Err(Error::Ordering { t, last });
            }
        }
        self.stamps.push(t);
        self.snapshots.push(g);
        Ok(())
    }

    /// Appends `|u|^p`.
    pub fn push_state(&mut self, t: f64, u: &GridFunction, p: f64) -> Result<()> {
        self.push(t, u.map(|v| v.abs().powf(p)))
    }
}

/// Quadrature weights of `∫_{t_0}^t (t-s)^{-γ} g(s) ds` on the ledger stamps, with `g`
/// held at its last value on `[t_K, t]`.
pub fn memory_weights(stamps: &[f64], gamma: f64, t: f64) -> Vec<f64> {
    let k = stamps.len();
    let mut w = vec![0.0; k];
    if k == 0 {
        return w;
    }
    for j in 0..k - 1 {
        let (lo, hi) = linear_product_weights(t - stamps[j + 1], stamps[j + 1] - stamps[j], -gamma);
        w[j] += lo;
        w[j + 1] += hi;
    }
    let tail = t - stamps[k - 1];
    if tail > 0.0 {
        w[k - 1] += tail.powf(1.0 - gamma) / (1.0 - gamma);
    }
    w
}

/// `∫_{t_0}^t (t-s)^{-γ} g(s) ds` for piecewise-linear `g` through the stored snapshots.
pub fn accumulate(ledger: &MemoryLedger, t: f64) -> Result<GridFunction> {
    let mut out = GridFunction::zeros(ledger.grid);
    accumulate_into(ledger, t, &mut out)?;
    Ok(out)
}

/// As [`accumulate`], writing into `out` (overwritten).
pub fn accumulate_into(ledger: &MemoryLedger, t: f64, out: &mut GridFunction) -> Result<()> {
    if let Some(last) = ledger.last_time() {
        if t < last {
            return Err(Error::Ordering { t, last });
        }
    }
    let w = memory_weights(&ledger.stamps, ledger.gamma, t);
    let dst = out.values_mut();
    dst.iter_mut().for_each(|v| *v = 0.0);
    for (wj, snap) in w.iter().zip(&ledger.snapshots) {
        if *wj == 0.0 {
            continue;
        }
        for (d, s) in dst.iter_mut().zip(snap.values()) {
            *d += wj * s;
        }
    }
    Ok(())
}

/// Thins the ledger according to `policy`. Removing a stamp keeps the piecewise-linear
/// interpolant whenever the data are linear across the merged pair of intervals.
pub fn trim(ledger: &MemoryLedger, policy: TrimPolicy) -> MemoryLedger {
    let ratio = match policy {
        TrimPolicy::KeepAll => return ledger.clone(),
        TrimPolicy::CoarsenTail { ratio } => ratio,
    };
    let k = ledger.len();
    if k < 3 {
        return ledger.clone();
    }
    let st = &ledger.stamps;
    let now = st[k - 1];
    let mut keep = vec![true; k];
    let mut prev = 0;
    let mut j = 1;
    while j + 1 < k {
        let width = st[j + 1] - st[prev];
        let age = now - st[j + 1];
        if age >= ratio * width {
            keep[j] = false;
            // the next stamp survives so merges stay pairwise
            prev = j + 1;
            j += 2;
        } else {
            prev = j;
            j += 1;
        }
    }
    let mut out = MemoryLedger {
        grid: ledger.grid,
        gamma: ledger.gamma,
        stamps: Vec::new(),
        snapshots: Vec::new(),
    };
    for (i, flag) in keep.iter().enumerate() {
        if *flag {
            out.stamps.push(st[i]);
            out.snapshots.push(ledger.snapshots[i].clone());
        }
    }
    out
}
