//! Mild-form time integration: exponential Duhamel stepping with adaptive steps and
//! blow-up detection, and the Picard fixed-point construction on a time slab.

use log::warn;

use crate::error::{Error, Result};
use crate::grid::{Grid, GridFunction};
use crate::memory::{accumulate_into, memory_weights, MemoryLedger, TrimPolicy};
use crate::params::Params;
use crate::spectral::Semigroup;

/// Tail energy fraction above which a field counts as under-resolved.
pub const TAIL_WARNING: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub params: Params,
    pub grid: Grid,
    pub dt0: f64,
    pub dt_min: f64,
    pub blowup_threshold: f64,
    pub t_end: f64,
    /// Keep every `stride`-th state as a snapshot (the final state is always kept).
    pub stride: usize,
    /// `c_ad` in `dt = min(dt0, c_ad ‖u‖^{-(p-1)/(2-γ)})`.
    pub c_adapt: f64,
    /// Multiplies the memory term; 0 gives the homogeneous equation.
    pub coupling: f64,
    pub trim: TrimPolicy,
}

impl SolverConfig {
    pub fn new(params: Params, grid: Grid, t_end: f64) -> Self {
        Self {
            params,
            grid,
            dt0: 1e-3,
            dt_min: 1e-12,
            blowup_threshold: 1e8,
            t_end,
            stride: 1,
            c_adapt: 0.1,
            coupling: 1.0,
            trim: TrimPolicy::KeepAll,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.dim() != self.params.n() {
            return Err(Error::Domain(format!(
                "grid dimension {} does not match n = {}",
                self.grid.dim(),
                self.params.n()
            )));
        }
        if !(self.dt_min > 0.0 && self.dt_min <= self.dt0) || !self.dt0.is_finite() {
            return Err(Error::Domain(format!(
                "need 0 < dt_min <= dt0, got dt_min = {}, dt0 = {}",
                self.dt_min, self.dt0
            )));
        }
        if !(self.blowup_threshold >= 1e3) {
            return Err(Error::Domain(format!(
                "blow-up threshold must be >= 1e3, got {}",
                self.blowup_threshold
            )));
        }
        if !(self.t_end > 0.0) || !self.t_end.is_finite() {
            return Err(Error::Domain(format!("t_end must be positive, got {}", self.t_end)));
        }
        if self.stride == 0 {
            return Err(Error::Domain("snapshot stride must be >= 1".into()));
        }
        if !(self.c_adapt > 0.0) {
            return Err(Error::Domain(format!("c_adapt must be positive, got {}", self.c_adapt)));
        }
        if !self.coupling.is_finite() {
            return Err(Error::Domain("coupling must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Completed,
    BlewUp,
    StepUnderflow,
    /// A non-finite value appeared; the offending state is not recorded.
    NonFinite,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Completed => "completed",
            Status::BlewUp => "blew_up",
            Status::StepUnderflow => "step_underflow",
            Status::NonFinite => "non_finite",
        }
    }
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub u: GridFunction,
}

/// Recorded run. Channel vectors are indexed by step, entry 0 being the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub params: Params,
    pub grid: Grid,
    pub blowup_threshold: f64,
    pub times: Vec<f64>,
    pub sup_norms: Vec<f64>,
    pub l1_norms: Vec<f64>,
    pub means: Vec<f64>,
    /// Step that produced each entry (0 for the initial state).
    pub dts: Vec<f64>,
    pub snapshots: Vec<Snapshot>,
    pub status: Status,
    pub t_last: f64,
    /// Largest `|u|` seen within one spacing of the box boundary.
    pub boundary_max: f64,
    /// Largest upper-third spectral energy fraction seen.
    pub tail_max: f64,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn final_sup(&self) -> f64 {
        self.sup_norms.last().copied().unwrap_or(0.0)
    }

    fn record(&mut self, t: f64, dt: f64, u: &GridFunction) {
        self.times.push(t);
        self.sup_norms.push(u.sup_norm());
        self.l1_norms.push(u.lp_norm(1.0).unwrap_or(f64::NAN));
        self.means.push(u.integral());
        self.dts.push(dt);
        self.boundary_max = self.boundary_max.max(u.boundary_sup());
    }
}

/// One exponential Duhamel step of the mild equation.
#[derive(Debug, Clone)]
pub struct Stepper {
    params: Params,
    semigroup: Semigroup,
    coupling: f64,
    scratch: GridFunction,
}

/// Result of a single step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub u: GridFunction,
    pub t: f64,
    pub tail_fraction: f64,
}

impl Stepper {
    pub fn new(params: Params, grid: Grid, coupling: f64) -> Result<Self> {
        Ok(Self {
            params,
            semigroup: Semigroup::new(grid, params.m())?,
            coupling,
            scratch: GridFunction::zeros(grid),
        })
    }

    pub fn semigroup(&self) -> &Semigroup {
        &self.semigroup
    }

    /// `u⁺ = S(dt)(u + dt F(t))` with `F(t) = ∫_0^t (t-s)^{-γ}|u|^p ds` from the ledger,
    /// then records `|u⁺|^p` at `t + dt`. An empty ledger starts at `t = 0` with `u`.
    pub fn step(&mut self, u: &GridFunction, ledger: &mut MemoryLedger, dt: f64) -> Result<StepOutcome> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("step must be positive, got {dt}")));
        }
        if ledger.is_empty() {
            ledger.push_state(0.0, u, self.params.p())?;
        }
        let t = ledger.last_time().unwrap_or(0.0);
        let mut v = u.clone();
        if self.coupling != 0.0 {
            accumulate_into(ledger, t, &mut self.scratch)?;
            v.add_scaled(dt * self.coupling, &self.scratch);
        }
        let (next, tail) = self.semigroup.apply_diagnosed(&v, dt)?;
        if !next.is_finite() {
            return Err(Error::Domain(format!("non-finite state after step to t = {}", t + dt)));
        }
        ledger.push_state(t + dt, &next, self.params.p())?;
        Ok(StepOutcome {
            u: next,
            t: t + dt,
            tail_fraction: tail,
        })
    }
}

/// Single step from `u` with ledger `ledger`; see [`Stepper::step`].
pub fn duhamel_step(params: &Params, u: &GridFunction, ledger: &mut MemoryLedger, dt: f64) -> Result<GridFunction> {
    Stepper::new(*params, *u.grid(), 1.0)?.step(u, ledger, dt).map(|o| o.u)
}

/// Adaptive step `min(dt0, c_ad ‖u‖^{-(p-1)/(2-γ)})`.
pub fn adaptive_step(config: &SolverConfig, sup: f64) -> f64 {
    let p = config.params.p();
    let g = config.params.gamma();
    if sup > 0.0 {
        config.dt0.min(config.c_adapt * sup.powf(-(p - 1.0) / (2.0 - g)))
    } else {
        config.dt0
    }
}

/// Integrates from `u0` until `t_end`, the blow-up threshold, or step underflow.
pub fn run_simulation(config: &SolverConfig, u0: &GridFunction) -> Result<Trajectory> {
    config.validate()?;
    if u0.grid() != &config.grid {
        return Err(Error::Domain("initial data live on a different grid".into()));
    }
    if !u0.is_finite() {
        return Err(Error::Domain("initial data must be finite".into()));
    }
    let p = config.params.p();
    let mut stepper = Stepper::new(config.params, config.grid, config.coupling)?;
    let mut ledger = MemoryLedger::new(config.grid, config.params.gamma())?;
    ledger.push_state(0.0, u0, p)?;

    let mut traj = Trajectory {
        params: config.params,
        grid: config.grid,
        blowup_threshold: config.blowup_threshold,
        times: Vec::new(),
        sup_norms: Vec::new(),
        l1_norms: Vec::new(),
        means: Vec::new(),
        dts: Vec::new(),
        snapshots: vec![Snapshot { t: 0.0, u: u0.clone() }],
        status: Status::Completed,
        t_last: 0.0,
        boundary_max: 0.0,
        tail_max: stepper.semigroup().tail_fraction(u0),
    };
    traj.record(0.0, 0.0, u0);

    let mut u = u0.clone();
    let mut t = 0.0;
    let mut steps = 0usize;
    let mut warned = false;
    let finish_tol = 1e-12 * config.t_end.max(1.0);
    loop {
        let sup = u.sup_norm();
        if sup >= config.blowup_threshold {
            traj.status = Status::BlewUp;
            break;
        }
        let remaining = config.t_end - t;
        if remaining <= finish_tol {
            traj.status = Status::Completed;
            break;
        }
        let dt = adaptive_step(config, sup).min(remaining);
        if dt < config.dt_min && dt < remaining {
            traj.status = Status::StepUnderflow;
            break;
        }
        let out = match stepper.step(&u, &mut ledger, dt) {
            Ok(o) => o,
            Err(_) => {
                traj.status = Status::NonFinite;
                break;
            }
        };
        if out.tail_fraction > TAIL_WARNING && !warned {
            warn!(
                "under-resolved field at t = {:.6e}: upper-third spectral energy fraction {:.3e}",
                out.t, out.tail_fraction
            );
            warned = true;
        }
        traj.tail_max = traj.tail_max.max(out.tail_fraction);
        u = out.u;
        t = out.t;
        steps += 1;
        traj.record(t, dt, &u);
        if steps.is_multiple_of(config.stride) {
            traj.snapshots.push(Snapshot { t, u: u.clone() });
        }
        if let TrimPolicy::CoarsenTail { .. } = config.trim {
            if steps.is_multiple_of(64) {
                ledger = crate::memory::trim(&ledger, config.trim);
            }
        }
    }
    traj.t_last = t;
    if traj.snapshots.last().map(|s| s.t) != Some(t) {
        traj.snapshots.push(Snapshot { t, u });
    }
    Ok(traj)
}

/// Largest `T` with `T^{2-γ} 2^p ‖u₀‖^{p-1} / ((1-γ)(2-γ)) ≤ 1`; infinite for zero data.
pub fn guaranteed_existence_time(params: &Params, sup_u0: f64) -> f64 {
    existence_time_with_factor(params, sup_u0, 1.0)
}

/// `C(p)` with `||u|^p - |v|^p| ≤ C(p)|u - v|(|u|^{p-1} + |v|^{p-1})`.
pub fn lipschitz_constant(p: f64) -> f64 {
    (0.5 * p).max(1.0)
}

/// Largest `T` for which the map `Ψ` is a 1/2-contraction on the ball of radius `2‖u₀‖`:
/// the existence-time condition with the extra factor `max(2C(p), 1)`.
pub fn contraction_time(params: &Params, sup_u0: f64) -> f64 {
    existence_time_with_factor(params, sup_u0, (2.0 * lipschitz_constant(params.p())).max(1.0))
}

fn existence_time_with_factor(params: &Params, sup_u0: f64, factor: f64) -> f64 {
    if sup_u0 <= 0.0 {
        return f64::INFINITY;
    }
    let g = params.gamma();
    let p = params.p();
    let base = (1.0 - g) * (2.0 - g) / (2f64.powf(p) * sup_u0.powf(p - 1.0) * factor);
    base.powf(1.0 / (2.0 - g))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardResult {
    pub times: Vec<f64>,
    pub path: Vec<GridFunction>,
    pub iterations: usize,
    /// Largest observed ratio of successive sup-distances (0 if only one was measurable).
    pub contraction_factor: f64,
    pub distances: Vec<f64>,
}

/// Applies `Ψ(u)(t) = S(t)u₀ + ∫_0^t S(t-s) F(s) ds` on the uniform slab, with
/// `F(s) = ∫_0^s (s-σ)^{-γ}|u(σ)|^p dσ` and the outer integral by the exponential
/// trapezoid rule.
fn picard_map(
    params: &Params,
    sg: &Semigroup,
    u0: &GridFunction,
    times: &[f64],
    path: &[GridFunction],
) -> Result<Vec<GridFunction>> {
    let grid = *u0.grid();
    let p = params.p();
    let gamma = params.gamma();
    let powers: Vec<GridFunction> = path.iter().map(|u| u.map(|v| v.abs().powf(p))).collect();
    let forcing: Vec<GridFunction> = (0..times.len())
        .map(|k| {
            let w = memory_weights(&times[..=k], gamma, times[k]);
            let mut f = GridFunction::zeros(grid);
            for (wj, g) in w.iter().zip(&powers) {
                f.add_scaled(*wj, g);
            }
            f
        })
        .collect();
    let mut out = Vec::with_capacity(times.len());
    out.push(u0.clone());
    for k in 0..times.len() - 1 {
        let dt = times[k + 1] - times[k];
        let mut v = out[k].clone();
        v.add_scaled(0.5 * dt, &forcing[k]);
        let mut next = sg.apply(&v, dt)?;
        next.add_scaled(0.5 * dt, &forcing[k + 1]);
        if !next.is_finite() {
            return Err(Error::Domain("picard iterate became non-finite".into()));
        }
        out.push(next);
    }
    Ok(out)
}

/// Fixed-point iteration of `Ψ` on `[0, horizon]` discretized with `steps` uniform steps,
/// starting from the constant path `u₀`. Converged when the sup-distance between
/// successive iterates drops below `tol`.
pub fn picard_solve(
    params: &Params,
    u0: &GridFunction,
    horizon: f64,
    steps: usize,
    tol: f64,
    max_iter: usize,
) -> Result<PicardResult> {
    if !(horizon > 0.0) || !horizon.is_finite() {
        return Err(Error::Domain(format!("picard horizon must be positive, got {horizon}")));
    }
    if steps < 1 || max_iter < 1 {
        return Err(Error::Domain("picard needs at least one step and one iteration".into()));
    }
    if u0.grid().dim() != params.n() {
        return Err(Error::Domain("grid dimension does not match n".into()));
    }
    let sg = Semigroup::new(*u0.grid(), params.m())?;
    let times: Vec<f64> = (0..=steps)
        .map(|k| if k == steps { horizon } else { horizon * k as f64 / steps as f64 })
        .collect();
    let mut path = vec![u0.clone(); steps + 1];
    let mut distances = Vec::new();
    let scale = u0.sup_norm().max(1e-300);
    for iter in 1..=max_iter {
        let next = match picard_map(params, &sg, u0, &times, &path) {
            Ok(n) => n,
            Err(_) => {
                return Err(Error::NotContracting {
                    horizon,
                    last_distances: distances,
                })
            }
        };
        let d = next
            .iter()
            .zip(&path)
            .map(|(a, b)| {
                a.values()
                    .iter()
                    .zip(b.values())
                    .fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
            })
            .fold(0.0f64, f64::max);
        distances.push(d);
        path = next;
        if d < tol {
            return Ok(PicardResult {
                times,
                path,
                iterations: iter,
                contraction_factor: contraction_factor(&distances, scale),
                distances,
            });
        }
    }
    let k = distances.len();
    let growing = k >= 2 && distances[k - 1] >= distances[k - 2];
    if growing {
        Err(Error::NotContracting {
            horizon,
            last_distances: distances[k.saturating_sub(4)..].to_vec(),
        })
    } else {
        Err(Error::NotConverged {
            iterations: max_iter,
            distance: distances[k - 1],
        })
    }
}

/// Largest successive ratio among distances above round-off level.
fn contraction_factor(distances: &[f64], scale: f64) -> f64 {
    let floor = 1e-13 * scale;
    distances
        .windows(2)
        .filter(|w| w[0] > floor && w[1] > floor)
        .map(|w| w[1] / w[0])
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::apply_semigroup;

    fn params() -> Params {
        Params::new(1, 1, 0.5, 2.0).unwrap()
    }

    #[test]
    fn zero_is_a_fixed_point() {
        let g = Grid::new(1, 4.0, 32).unwrap();
        let mut ledger = MemoryLedger::new(g, 0.5).unwrap();
        let u = duhamel_step(&params(), &GridFunction::zeros(g), &mut ledger, 0.1).unwrap();
        assert_eq!(u.sup_norm(), 0.0);
        assert_eq!(ledger.len(), 2);

        let cfg = SolverConfig::new(params(), g, 0.5);
        let traj = run_simulation(&cfg, &GridFunction::zeros(g)).unwrap();
        assert_eq!(traj.status, Status::Completed);
        assert!((traj.t_last - 0.5).abs() < 1e-12);
        assert!(traj.sup_norms.iter().all(|&s| s == 0.0));
    }

    #[test]
    fn uncoupled_step_is_the_semigroup() {
        let g = Grid::new(1, 4.0, 64).unwrap();
        let u = GridFunction::from_fn(g, |x| (-x[0] * x[0]).exp());
        let mut ledger = MemoryLedger::new(g, 0.5).unwrap();
        let mut st = Stepper::new(params(), g, 0.0).unwrap();
        st.step(&u, &mut ledger, 0.05).unwrap();
        let out = st.step(&u, &mut ledger, 0.05).unwrap();
        let expect = apply_semigroup(&u, 1, 0.05).unwrap();
        for (a, b) in out.u.values().iter().zip(expect.values()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn existence_time_values() {
        let t = guaranteed_existence_time(&params(), 1.0);
        assert!((t - (3.0f64 / 16.0).powf(2.0 / 3.0)).abs() < 1e-15);
        assert!((t - 0.327_592_674_276_112).abs() < 1e-14);
        assert!(guaranteed_existence_time(&params(), 0.0).is_infinite());
        let r = guaranteed_existence_time(&params(), 4.0) / t;
        assert!((r - 4f64.powf(-2.0 / 3.0)).abs() < 1e-14);
        assert!(contraction_time(&params(), 1.0) < t);
    }

    #[test]
    fn lipschitz_constant_bounds_power_differences() {
        for &p in &[1.2, 1.5, 2.0, 3.0, 4.5] {
            let c = lipschitz_constant(p);
            for i in 0..40 {
                for j in 0..40 {
                    let u = -2.0 + 0.1 * i as f64;
                    let v = -2.0 + 0.1 * j as f64 + 0.013;
                    let lhs = (u.abs().powf(p) - v.abs().powf(p)).abs();
                    let rhs = c * (u - v).abs() * (u.abs().powf(p - 1.0) + v.abs().powf(p - 1.0));
                    assert!(lhs <= rhs * (1.0 + 1e-12), "p={p} u={u} v={v}");
                }
            }
        }
    }

    #[test]
    fn config_validation() {
        let g = Grid::new(1, 4.0, 32).unwrap();
        let mut c = SolverConfig::new(params(), g, 1.0);
        c.dt_min = 1.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::new(params(), g, 1.0);
        c.blowup_threshold = 10.0;
        assert!(c.validate().is_err());
        let g2 = Grid::new(2, 4.0, 8).unwrap();
        assert!(SolverConfig::new(params(), g2, 1.0).validate().is_err());
    }

    #[test]
    fn constant_data_blows_up() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let cfg = SolverConfig::new(params(), g, 10.0);
        let traj = run_simulation(&cfg, &GridFunction::constant(g, 1.0)).unwrap();
        assert_eq!(traj.status, Status::BlewUp);
        assert!(traj.final_sup() >= cfg.blowup_threshold);
        assert!(traj.times.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn picard_zero_data() {
        let g = Grid::new(1, 4.0, 16).unwrap();
        let r = picard_solve(&params(), &GridFunction::zeros(g), 0.3, 20, 1e-12, 10).unwrap();
        assert_eq!(r.iterations, 1);
        assert!(r.path.iter().all(|u| u.sup_norm() == 0.0));
    }

    #[test]
    fn picard_diverges_past_blowup() {
        let g = Grid::new(1, 4.0, 8).unwrap();
        let err = picard_solve(&params(), &GridFunction::constant(g, 1.0), 5.0, 200, 1e-12, 30).unwrap_err();
        assert!(matches!(err, Error::NotContracting { .. }), "{err:?}");
    }
}
