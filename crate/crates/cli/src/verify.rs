//! Property suites behind `memheat verify`. Resolution follows `grid.points`.

use std::path::Path;

use anyhow::Result;
use clap::ValueEnum;
use memheat_core::fractional::{
    rl_derivative, rl_integral, w_profile_eval, weighted_integral_time_slope, weighted_profile_integral, ProfileKind,
    ProfileOrder, Side, TimeGrid, WProfile,
};
use memheat_core::liouville::{
    certificate_scan, certificate_terms, default_ell, polyharmonic_bound_check, BumpSpec, ScanSpec,
};
use memheat_core::memory::accumulate;
use memheat_core::quadrature::trapezoid_weights;
use memheat_core::spectral::{decay_slope_probe, kernel_slice};
use memheat_core::special::{beta, gamma};
use memheat_core::{Grid, GridFunction, MemoryLedger, Params, Regime, SpaceTimeField};

use crate::output::{cell, ensure_dir, Table};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Fractional,
    Spectral,
    Memory,
    Liouville,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: String,
    pub expected: f64,
    pub got: f64,
    pub tol: f64,
    pub pass: bool,
}

impl Check {
    /// `|got - expected| ≤ tol`
    fn abs(name: &str, expected: f64, got: f64, tol: f64) -> Self {
        Self::new(name, expected, got, tol, (got - expected).abs() <= tol)
    }

    /// `|got - expected| ≤ tol |expected|`
    fn rel(name: &str, expected: f64, got: f64, tol: f64) -> Self {
        Self::new(name, expected, got, tol, (got - expected).abs() <= tol * expected.abs())
    }

    /// `got ≤ expected`
    fn at_most(name: &str, expected: f64, got: f64) -> Self {
        Self::new(name, expected, got, 0.0, got <= expected)
    }

    /// `got ≥ expected`
    fn at_least(name: &str, expected: f64, got: f64) -> Self {
        Self::new(name, expected, got, 0.0, got >= expected)
    }

    fn new(name: &str, expected: f64, got: f64, tol: f64, pass: bool) -> Self {
        Self {
            name: name.into(),
            expected,
            got,
            tol,
            pass: pass && got.is_finite(),
        }
    }

    fn failed(name: &str, reason: impl std::fmt::Display) -> Self {
        log::warn!("{name}: {reason}");
        Self::new(name, f64::NAN, f64::NAN, 0.0, false)
    }

    pub fn line(&self) -> String {
        format!(
            "{}, {}, {}, {}, {}",
            self.name,
            self.expected,
            self.got,
            self.tol,
            if self.pass { "pass" } else { "FAIL" }
        )
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

fn try_check(name: &str, f: impl FnOnce() -> memheat_core::Result<Check>) -> Check {
    f().unwrap_or_else(|e| Check::failed(name, e))
}

pub fn fractional(points: usize) -> Vec<Check> {
    let m = 4 * points;
    let alpha = 0.5;
    let mut out = Vec::new();
    out.push(try_check("rl_integral_power_left", || {
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let v = rl_integral(&g, &g.sample(|t| t * t), alpha, Side::Left)?;
        Ok(Check::rel("rl_integral_power_left", gamma(3.0) / gamma(3.5), v[m], 1e-6))
    }));
    out.push(try_check("rl_integral_power_right", || {
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let v = rl_integral(&g, &g.sample(|t| (1.0 - t).powi(2)), alpha, Side::Right)?;
        Ok(Check::rel("rl_integral_power_right", gamma(3.0) / gamma(3.5), v[0], 1e-6))
    }));
    out.push(try_check("rl_derivative_power", || {
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let v = rl_derivative(&g, &g.sample(|t| t * t), alpha, Side::Left)?;
        Ok(Check::rel("rl_derivative_power", gamma(3.0) / gamma(2.5), v[m], 1e-6))
    }));
    out.push(try_check("left_inverse_sin", || {
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let f = g.sample(f64::sin);
        let d = rl_derivative(&g, &rl_integral(&g, &f, alpha, Side::Left)?, alpha, Side::Left)?;
        Ok(Check::abs("left_inverse_sin", 0.0, max_abs_diff(&d, &f), 1e-4))
    }));
    out.push(try_check("integration_by_parts", || {
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let f = g.sample(|t| (1.0 - t).powi(4) * t.exp());
        let h = g.sample(|t| t.powi(3) * t.cos());
        let w = trapezoid_weights(m, g.step());
        let dl = rl_derivative(&g, &h, alpha, Side::Left)?;
        let dr = rl_derivative(&g, &f, alpha, Side::Right)?;
        let lhs: f64 = (0..=m).map(|k| w[k] * f[k] * dl[k]).sum();
        let rhs: f64 = (0..=m).map(|k| w[k] * h[k] * dr[k]).sum();
        Ok(Check::abs("integration_by_parts", 0.0, (lhs - rhs).abs() / lhs.abs(), 1e-6))
    }));
    out.push(try_check("w1_alpha_derivative", || {
        let w = WProfile::new(ProfileKind::Decaying, 5.0, 1.0)?;
        let g = TimeGrid::new(0.0, 1.0, m)?;
        let v = g.sample(|t| w_profile_eval(&w, alpha, t, ProfileOrder::Value).unwrap());
        let d = rl_derivative(&g, &v, alpha, Side::Right)?;
        let exact: Vec<f64> = g.nodes().iter().map(|&t| w_profile_eval(&w, alpha, t, ProfileOrder::Alpha).unwrap()).collect();
        Ok(Check::abs("w1_alpha_derivative", 0.0, max_abs_diff(&d, &exact), 1e-6))
    }));
    out.push(try_check("w2_alpha_derivative", || {
        let w = WProfile::new(ProfileKind::Growing, 5.0, 1.0)?;
        let g = TimeGrid::new(-1.0, 0.0, m)?;
        let v = g.sample(|t| w_profile_eval(&w, alpha, t, ProfileOrder::Value).unwrap());
        let d = rl_derivative(&g, &v, alpha, Side::Left)?;
        let exact: Vec<f64> = g.nodes().iter().map(|&t| w_profile_eval(&w, alpha, t, ProfileOrder::Alpha).unwrap()).collect();
        Ok(Check::abs("w2_alpha_derivative", 0.0, max_abs_diff(&d, &exact), 1e-6))
    }));
    for (name, order) in [("weighted_integral_alpha", ProfileOrder::Alpha), ("weighted_integral_one_plus_alpha", ProfileOrder::OnePlusAlpha)] {
        out.push(try_check(name, || {
            let w = WProfile::new(ProfileKind::Decaying, 5.0, 1.0)?;
            let v = weighted_profile_integral(&w, alpha, 2.0, order)?;
            Ok(Check::abs(name, v.closed_form, v.quadrature, 1e-6))
        }));
    }
    out.push(try_check("weighted_integral_time_slope", || {
        // α = 0.3, p = 3: exponent 1 - αp/(p-1) = 0.55
        let s = weighted_integral_time_slope(ProfileKind::Decaying, 5.0, 0.3, 3.0, ProfileOrder::Alpha, &[1.0, 2.0, 4.0, 8.0, 16.0])?;
        Ok(Check::abs("weighted_integral_time_slope", 1.0 - 0.3 * 1.5, s, 1e-3))
    }));
    out
}

pub fn spectral(points: usize) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(try_check("heat_kernel_gaussian", || {
        let g = Grid::new(1, 20.0, points)?;
        let k = kernel_slice(&g, 1, 1.0)?;
        let exact = GridFunction::from_fn(g, |x| (-x[0] * x[0] / 4.0).exp() / (4.0 * std::f64::consts::PI).sqrt());
        Ok(Check::abs("heat_kernel_gaussian", 0.0, max_abs_diff(k.values(), exact.values()), 1e-8))
    }));
    for m in 1..=3 {
        let name = format!("kernel_mass_m{m}");
        out.push(try_check(&name, || {
            let g = Grid::new(1, 20.0, points)?;
            Ok(Check::abs(&name, 1.0, kernel_slice(&g, m, 1.0)?.integral(), 1e-12))
        }));
    }
    out.push(try_check("biharmonic_sign_change", || {
        let g = Grid::new(1, 20.0, points)?;
        let k = kernel_slice(&g, 2, 1.0)?;
        Ok(Check::at_most("biharmonic_sign_change", -1e-4 * k.max(), k.min()))
    }));
    for m in [1usize, 2] {
        let name = format!("lp_lq_slope_m{m}_1_inf");
        out.push(try_check(&name, || {
            let g = Grid::new(1, 20.0, points)?;
            let f = decay_slope_probe(&g, m, 1.0, f64::INFINITY, &[0.5, 1.0, 2.0, 4.0, 8.0])?;
            Ok(Check::rel(&name, f.predicted, f.slope, 0.02))
        }));
    }
    out
}

pub fn memory(points: usize) -> Vec<Check> {
    let grid = Grid::new(1, 1.0, 2).expect("valid grid");
    let ledger = |steps: usize, gamma: f64, f: &dyn Fn(f64) -> f64| -> memheat_core::Result<MemoryLedger> {
        let mut l = MemoryLedger::new(grid, gamma)?;
        for k in 0..=steps {
            let t = k as f64 / steps as f64;
            l.push(t, GridFunction::constant(grid, f(t)))?;
        }
        Ok(l)
    };
    let mut out = Vec::new();
    out.push(try_check("constant_integrand", || {
        let v = accumulate(&ledger(points, 0.3, &|_| 1.0)?, 1.0)?.values()[0];
        Ok(Check::abs("constant_integrand", 1.0 / 0.7, v, 1e-12))
    }));
    out.push(try_check("linear_integrand_beta", || {
        let v = accumulate(&ledger(points, 0.5, &|s| s)?, 1.0)?.values()[0];
        Ok(Check::abs("linear_integrand_beta", beta(2.0, 0.5), v, 1e-10))
    }));
    out.push(try_check("quadratic_order", || {
        let exact = beta(3.0, 0.5);
        let e1 = (accumulate(&ledger(points, 0.5, &|s| s * s)?, 1.0)?.values()[0] - exact).abs();
        let e2 = (accumulate(&ledger(2 * points, 0.5, &|s| s * s)?, 1.0)?.values()[0] - exact).abs();
        Ok(Check::at_least("quadratic_order", 1.9, (e1 / e2).log2()))
    }));
    out
}

pub fn liouville(points: usize) -> Vec<Check> {
    let mut out = Vec::new();
    out.push(try_check("c_hat_refinement", || {
        let s = BumpSpec::new(default_ell(1, 2.0), 1.0, 1)?;
        let coarse = polyharmonic_bound_check(&s, 1, 2.0, points / 2)?.c_hat;
        let fine = polyharmonic_bound_check(&s, 1, 2.0, points)?.c_hat;
        Ok(Check::abs("c_hat_refinement", 0.0, (coarse - fine).abs() / fine, 0.01))
    }));
    out.push(try_check("l3_radius_scaling", || {
        let s = BumpSpec::new(default_ell(1, 2.0), 1.0, 1)?;
        let b = polyharmonic_bound_check(&s, 1, 2.0, points)?;
        Ok(Check::rel("l3_radius_scaling", b.l3_predicted, b.l3_ratio, 0.02))
    }));
    let horizons = [4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0];
    let zero = |g: &Grid, t: f64, m: usize| Ok(SpaceTimeField::zeros(*g, t, m));
    out.push(try_check("subcritical_slope", || {
        let params = Params::new(1, 1, 0.5, 2.0)?;
        let spec = ScanSpec::defaults(&params, Grid::new(1, 40.0, 8 * points)?);
        let t = certificate_scan(&params, Regime::Subcritical, &horizons, &spec, &zero)?;
        Ok(Check::rel("subcritical_slope", t.predicted, t.slope, 0.05))
    }));
    out.push(try_check("memory_regime_slope", || {
        let params = Params::new(1, 1, 0.4, 2.0)?;
        let spec = ScanSpec::defaults(&params, Grid::new(1, 8.0, 2 * points)?);
        let t = certificate_scan(&params, Regime::Memory, &horizons, &spec, &zero)?;
        Ok(Check::rel("memory_regime_slope", t.predicted, t.slope, 0.05))
    }));
    out.push(try_check("holder_young_sampled_field", || {
        let params = Params::new(1, 1, 0.5, 2.0)?;
        let g = Grid::new(1, 16.0, points)?;
        let v = SpaceTimeField::from_fn(g, 4.0, 256, |t, x| (1.0 + 0.3 * t).cos() * (-x[0] * x[0] / 9.0).exp() + 0.1)?;
        let r = certificate_terms(&v, &params, 2.0, 5.0, default_ell(1, 2.0))?;
        let worst = [r.i1 / r.holder_i1, r.j1 / r.holder_j1, r.i2 / r.young_i2, r.j2 / r.young_j2]
            .into_iter()
            .fold(0.0, f64::max);
        Ok(Check::at_most("holder_young_sampled_field", 1.0 + 1e-6, worst))
    }));
    out
}

pub fn run_suite(suite: Suite, points: usize) -> Vec<Check> {
    match suite {
        Suite::Fractional => fractional(points),
        Suite::Spectral => spectral(points),
        Suite::Memory => memory(points),
        Suite::Liouville => liouville(points),
        Suite::All => [fractional(points), spectral(points), memory(points), liouville(points)].concat(),
    }
}

/// Runs the suite, prints one line per check, writes `verify_<suite>.csv`; returns whether all passed.
pub fn verify(suite: Suite, points: usize, out: &Path) -> Result<bool> {
    let checks = run_suite(suite, points);
    let mut t = Table::new(&["name", "expected", "got", "tol", "pass"]);
    for c in &checks {
        println!("{}", c.line());
        t.push(vec![c.name.clone(), cell(c.expected), cell(c.got), cell(c.tol), cell(c.pass)]);
    }
    let dir = ensure_dir(out)?;
    let name = suite.to_possible_value().expect("no skipped variants").get_name().to_string();
    t.write(&dir.join(format!("verify_{name}.csv")))?;
    let failed: Vec<&str> = checks.iter().filter(|c| !c.pass).map(|c| c.name.as_str()).collect();
    if failed.is_empty() {
        println!("{} checks passed", checks.len());
    } else {
        println!("{} of {} checks failed: {}", failed.len(), checks.len(), failed.join(", "));
    }
    Ok(failed.is_empty())
}
