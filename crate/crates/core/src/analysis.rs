//! Post-processing of blow-up runs: `T*` extrapolation, rate fits, the lower-bound
//! certificate and the rescaling diagnostics of the upper-bound argument.

use crate::error::{Error, Result};
use crate::params::CriticalExponent;
use crate::quadrature::fit_line;
use crate::solver::{Status, Trajectory};

/// Both branches of `p_*` and their max.
pub fn critical_exponent(n: usize, m: usize, gamma: f64) -> CriticalExponent {
    CriticalExponent::new(n, m, gamma)
}

/// Blow-up time extrapolated from `z = sup^{-1/α₁}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupTime {
    pub t_star: f64,
    /// Index range `[first, last]` of the samples used.
    pub window: (usize, usize),
    pub residual: f64,
    /// Whether the window had to be widened past the last decade.
    pub widened: bool,
}

fn require_blowup(traj: &Trajectory) -> Result<()> {
    if traj.status != Status::BlewUp {
        return Err(Error::Precondition(format!(
            "trajectory status is {}, not blew_up",
            traj.status
        )));
    }
    Ok(())
}

fn z_window(traj: &Trajectory, decades: f64) -> (usize, usize) {
    let last = traj.len() - 1;
    let floor = traj.final_sup() / 10f64.powf(decades);
    let mut first = last;
    while first > 0 && traj.sup_norms[first - 1] >= floor {
        first -= 1;
    }
    (first, last)
}

/// Root of the linear fit of `z(t) = sup(t)^{-(p-1)/(2-γ)}` over the last decade of norms.
pub fn estimate_blowup_time(traj: &Trajectory) -> Result<BlowupTime> {
    require_blowup(traj)?;
    let alpha1 = traj.params.derived().alpha1;
    let mut diagnostics = Vec::new();
    for (decades, widened) in [(1.0, false), (2.0, true)] {
        let (first, last) = z_window(traj, decades);
        let ts = &traj.times[first..=last];
        let zs: Vec<f64> = traj.sup_norms[first..=last]
            .iter()
            .map(|s| s.powf(-1.0 / alpha1))
            .collect();
        let monotone = zs.windows(2).all(|w| w[1] <= w[0]);
        if !monotone || zs.len() < 3 {
            diagnostics.push(format!(
                "window of {decades} decade(s) has {} samples, monotone = {monotone}",
                zs.len()
            ));
            continue;
        }
        let fit = fit_line(ts, &zs)?;
        if !(fit.slope < 0.0) {
            return Err(Error::Estimation(format!("z(t) is not decreasing (slope {})", fit.slope)));
        }
        return Ok(BlowupTime {
            t_star: -fit.intercept / fit.slope,
            window: (first, last),
            residual: fit.residual,
            widened,
        });
    }
    Err(Error::Estimation(diagnostics.join("; ")))
}

/// Fitted blow-up rate against `α₁ = (2-γ)/(p-1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlowupReport {
    pub t_star: f64,
    pub alpha_hat: f64,
    pub alpha1: f64,
    pub rel_err: f64,
    /// Sup-norm range of the fit window.
    pub window: (f64, f64),
    pub points: usize,
    pub residual: f64,
    /// `sup · (T* - t)^{α̂}` implied by the fit.
    pub prefactor: f64,
}

pub const RATE_WINDOW: (f64, f64) = (1e2, 1e6);
pub const RATE_MIN_POINTS: usize = 8;

/// Least-squares slope of `log sup` against `log(T* - t)` over `sup ∈ [10², 10⁶]`.
pub fn fit_blowup_rate(traj: &Trajectory, t_star: f64) -> Result<BlowupReport> {
    fit_blowup_rate_in(traj, t_star, RATE_WINDOW)
}

pub fn fit_blowup_rate_in(traj: &Trajectory, t_star: f64, window: (f64, f64)) -> Result<BlowupReport> {
    require_blowup(traj)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, s) in traj.times.iter().zip(&traj.sup_norms) {
        if *s >= window.0 && *s <= window.1 && *t < t_star {
            xs.push((t_star - t).ln());
            ys.push(s.ln());
        }
    }
    if xs.len() < RATE_MIN_POINTS {
        return Err(Error::WindowTooShort {
            got: xs.len(),
            need: RATE_MIN_POINTS,
        });
    }
    let fit = fit_line(&xs, &ys)?;
    let alpha1 = traj.params.derived().alpha1;
    let alpha_hat = -fit.slope;
    Ok(BlowupReport {
        t_star,
        alpha_hat,
        alpha1,
        rel_err: (alpha_hat - alpha1).abs() / alpha1,
        window,
        points: xs.len(),
        residual: fit.residual,
        prefactor: fit.intercept.exp(),
    })
}

/// `T*` estimate followed by the rate fit.
pub fn analyze_blowup(traj: &Trajectory) -> Result<BlowupReport> {
    let t = estimate_blowup_time(traj)?;
    fit_blowup_rate(traj, t.t_star)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundReport {
    /// Per-sample outcome for samples with `0 < sup` and `t < T*`.
    pub passed: Vec<bool>,
    pub pass_fraction: f64,
    /// Pass fraction restricted to the last decade of norms.
    pub last_decade_fraction: f64,
    /// `c` in `c (T* - s)^{-α₁} < sup` implied by the inequality.
    pub implied_c: f64,
    /// Smallest observed `sup · (T* - s)^{α₁}`.
    pub observed_c: f64,
}

/// Checks `(T* - s)^{2-γ} > (θ - ‖u(s)‖)/(C θ^p)` with `θ = 2‖u(s)‖` and
/// `C = 2^p / ((1-γ)(2-γ))` at every recorded sample.
pub fn lower_bound_certificate(traj: &Trajectory, t_star: f64) -> Result<LowerBoundReport> {
    require_blowup(traj)?;
    let g = traj.params.gamma();
    let p = traj.params.p();
    let alpha1 = traj.params.derived().alpha1;
    let c = 2f64.powf(p) / ((1.0 - g) * (2.0 - g));
    let floor = traj.final_sup() / 10.0;
    let mut passed = Vec::new();
    let mut late = (0usize, 0usize);
    let mut observed_c = f64::INFINITY;
    for (t, s) in traj.times.iter().zip(&traj.sup_norms) {
        if !(*s > 0.0) || *t >= t_star {
            continue;
        }
        let theta = 2.0 * s;
        let rhs = (theta - s) / (c * theta.powf(p));
        let ok = (t_star - t).powf(2.0 - g) > rhs;
        passed.push(ok);
        if *s >= floor {
            late.0 += ok as usize;
            late.1 += 1;
        }
        observed_c = observed_c.min(s * (t_star - t).powf(alpha1));
    }
    if passed.is_empty() {
        return Err(Error::Precondition("no samples before T*".into()));
    }
    let pass_fraction = passed.iter().filter(|&&b| b).count() as f64 / passed.len() as f64;
    // θ = 2‖u‖ turns the inequality into ‖u‖ > (C 2^p)^{-1/(p-1)} (T*-s)^{-α₁}
    let implied_c = (c * 2f64.powf(p)).powf(-1.0 / (p - 1.0));
    Ok(LowerBoundReport {
        passed,
        pass_fraction,
        last_decade_fraction: if late.1 > 0 { late.0 as f64 / late.1 as f64 } else { 0.0 },
        implied_c,
        observed_c,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RescaleDiagnostics {
    pub t0: f64,
    /// Running maximum `M(t₀)`.
    pub m_t0: f64,
    /// Last time with `M(t) = 2M(t₀)`.
    pub t0_plus: f64,
    pub lambda: f64,
    pub a: f64,
    /// Largest `|φ^λ|` over the snapshots in `[t̂, t₀⁺]`.
    pub bound_check: f64,
    /// `|φ^λ(0, 0)| = λ^{2mα₁}|u(x̂, t̂)|`.
    pub phi_origin: f64,
    pub t_hat: f64,
    pub x_hat: Vec<f64>,
    pub window_samples: usize,
    /// `t₀⁺` lies beyond the recorded data.
    pub partial: bool,
}

/// Running maximum of the recorded sup-norms.
pub fn running_max(traj: &Trajectory) -> Vec<f64> {
    let mut m = 0.0f64;
    traj.sup_norms
        .iter()
        .map(|&s| {
            m = m.max(s);
            m
        })
        .collect()
}

fn interpolate(ts: &[f64], ys: &[f64], t: f64) -> f64 {
    match ts.iter().position(|&x| x >= t) {
        None => *ys.last().unwrap(),
        Some(0) => ys[0],
        Some(i) => {
            let w = (t - ts[i - 1]) / (ts[i] - ts[i - 1]);
            ys[i - 1] + w * (ys[i] - ys[i - 1])
        }
    }
}

/// `λ(t₀) = (M(t₀)/(2A))^{-1/(2mα₁)}`.
pub fn rescale_lambda(m_t0: f64, a: f64, m: usize, alpha1: f64) -> f64 {
    (m_t0 / (2.0 * a)).powf(-1.0 / (2.0 * m as f64 * alpha1))
}

/// Evaluates `M(t₀)`, `t₀⁺`, `λ(t₀)` and the bounds on `φ^λ(y,s) = λ^{2mα₁} u(λy + x̂, λ^{2m}s + t̂)`.
pub fn rescaled_diagnostics(traj: &Trajectory, t0: f64, a: f64) -> Result<RescaleDiagnostics> {
    if traj.is_empty() || !(t0 >= traj.times[0] && t0 <= traj.t_last) {
        return Err(Error::Precondition(format!("t0 = {t0} outside the recorded run")));
    }
    if !(a > 0.0) {
        return Err(Error::Domain(format!("normalization A must be positive, got {a}")));
    }
    let m = traj.params.m();
    let alpha1 = traj.params.derived().alpha1;
    let env = running_max(traj);
    let m_t0 = interpolate(&traj.times, &env, t0);
    if !(m_t0 > 0.0) {
        return Err(Error::Precondition("M(t0) vanishes".into()));
    }
    let target = 2.0 * m_t0;
    let (t0_plus, partial) = match env.iter().position(|&v| v > target) {
        None => (traj.t_last, true),
        Some(i) => {
            // M is nondecreasing, so the last time with M = 2M(t0) is the upward crossing
            let w = (target - env[i - 1]) / (env[i] - env[i - 1]);
            (traj.times[i - 1] + w * (traj.times[i] - traj.times[i - 1]), false)
        }
    };
    let lambda = rescale_lambda(m_t0, a, m, alpha1);
    let amp = lambda.powf(2.0 * m as f64 * alpha1);

    let anchor = traj
        .snapshots
        .iter()
        .rev()
        .find(|s| s.t <= t0 && s.u.sup_norm() >= 0.5 * m_t0)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "no snapshot at or before t0 = {t0} reaches M(t0)/2; record snapshots more densely"
            ))
        })?;
    let idx = anchor.u.argmax_abs();
    let mut x_hat = vec![0.0; traj.grid.dim()];
    traj.grid.point(idx, &mut x_hat);
    let phi_origin = amp * anchor.u.values()[idx].abs();

    let mut bound_check = 0.0f64;
    let mut window_samples = 0;
    for s in traj.snapshots.iter().filter(|s| s.t >= anchor.t && s.t <= t0_plus) {
        bound_check = bound_check.max(amp * s.u.sup_norm());
        window_samples += 1;
    }
    Ok(RescaleDiagnostics {
        t0,
        m_t0,
        t0_plus,
        lambda,
        a,
        bound_check,
        phi_origin,
        t_hat: anchor.t,
        x_hat,
        window_samples,
        partial,
    })
}
