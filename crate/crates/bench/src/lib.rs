//! Shared fixtures for the criterion benches.

use memheat_core::{Grid, GridFunction, MemoryLedger};

pub fn gaussian(dim: usize, half_width: f64, points: usize) -> GridFunction {
    let grid = Grid::new(dim, half_width, points).expect("valid grid");
    GridFunction::from_fn(grid, |x| (-x.iter().map(|v| v * v).sum::<f64>()).exp())
}

/// Ledger with `len` uniformly stamped copies of `f` on `[0, 1]`.
pub fn filled_ledger(f: &GridFunction, gamma: f64, len: usize) -> MemoryLedger {
    let mut l = MemoryLedger::new(*f.grid(), gamma).expect("valid gamma");
    for k in 0..len {
        l.push(k as f64 / (len - 1) as f64, f.clone()).expect("increasing stamps");
    }
    l
}
