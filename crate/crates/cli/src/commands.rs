//! `solve`, `sweep`, `rate` and `liouville` subcommands.

use std::path::Path;

use anyhow::{bail, Context, Result};
use memheat_core::analysis::{analyze_blowup, lower_bound_certificate, rescaled_diagnostics, running_max};
use memheat_core::liouville::{certificate_scan, critical_k_exponents, regime_radius, ScanSpec, ScanTable};
use memheat_core::solver::{run_simulation, SolverConfig};
use memheat_core::{Grid, GridFunction, Regime, SpaceTimeField, Status, TrimPolicy};
use memheat_core::{Params, Trajectory};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ExperimentConfig, InitData, RegimeKey};
use crate::output::{cell, ensure_dir, gnuplot, Report, Table};
use crate::UsageError;

/// Samples the initial-data descriptor on `grid`.
pub fn initial_data(init: &InitData, grid: Grid, seed: u64) -> GridFunction {
    match *init {
        InitData::Zero => GridFunction::zeros(grid),
        InitData::Constant { value } => GridFunction::constant(grid, value),
        InitData::Bump { height, width } => GridFunction::from_fn(grid, |x| {
            let r2: f64 = x.iter().map(|v| v * v).sum();
            height * (-r2 / (width * width)).exp()
        }),
        InitData::Random { amplitude } => random_field(grid, seed, amplitude),
    }
}

/// Eight random cosine modes with wavenumbers up to 4 per axis, scaled to sup norm `amplitude`.
fn random_field(grid: Grid, seed: u64, amplitude: f64) -> GridFunction {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = grid.dim();
    let scale = std::f64::consts::PI / grid.half_width();
    let modes: Vec<(Vec<f64>, f64, f64)> = (0..8)
        .map(|_| {
            let k: Vec<f64> = (0..n).map(|_| rng.random_range(-4i32..=4) as f64 * scale).collect();
            (k, rng.random_range(-1.0..1.0), rng.random_range(0.0..std::f64::consts::TAU))
        })
        .collect();
    let raw = GridFunction::from_fn(grid, |x| {
        modes
            .iter()
            .map(|(k, a, ph)| a * (k.iter().zip(x).map(|(ki, xi)| ki * xi).sum::<f64>() + ph).cos())
            .sum()
    });
    let sup = raw.sup_norm();
    if sup == 0.0 {
        raw
    } else {
        raw.map(|v| amplitude * v / sup)
    }
}

pub fn solver_config(cfg: &ExperimentConfig, params: Params) -> Result<SolverConfig> {
    let grid = cfg.grid().map_err(UsageError::from)?;
    let mut s = SolverConfig::new(params, grid, cfg.t_end);
    s.dt0 = cfg.dt0;
    s.dt_min = cfg.dt_min;
    s.blowup_threshold = cfg.threshold;
    s.stride = cfg.stride;
    s.c_adapt = cfg.c_adapt;
    if cfg.trim_ratio > 0.0 {
        s.trim = TrimPolicy::CoarsenTail { ratio: cfg.trim_ratio };
    }
    s.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(s)
}

fn trajectory_table(traj: &Trajectory) -> Table {
    let mut t = Table::new(&["t", "sup_norm", "l1_norm", "mean", "dt"]);
    for i in 0..traj.len() {
        t.push(vec![
            cell(traj.times[i]),
            cell(traj.sup_norms[i]),
            cell(traj.l1_norms[i]),
            cell(traj.means[i]),
            cell(traj.dts[i]),
        ]);
    }
    t
}

fn simulate(cfg: &ExperimentConfig) -> Result<Trajectory> {
    let params = cfg.params().map_err(UsageError::from)?;
    let sc = solver_config(cfg, params)?;
    let u0 = initial_data(&cfg.init, sc.grid, cfg.seed);
    Ok(run_simulation(&sc, &u0)?)
}

fn blowup_fields(report: &mut Report, traj: &Trajectory) {
    if traj.status != Status::BlewUp {
        return;
    }
    match analyze_blowup(traj) {
        Ok(b) => {
            report.set("t_star", b.t_star);
            report.set("alpha_hat", b.alpha_hat);
            report.set("alpha1", b.alpha1);
            report.set("rel_err", b.rel_err);
            report.set("fit_points", b.points);
            report.set("fit_residual", b.residual);
        }
        Err(e) => report.set("blowup_analysis_error", e),
    }
}

pub fn solve(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let traj = simulate(cfg)?;
    let dir = ensure_dir(out)?;
    trajectory_table(&traj).write(&dir.join("trajectory.csv"))?;
    std::fs::write(
        dir.join("trajectory.gp"),
        gnuplot("trajectory.csv", "sup norm", "t", &[(2, "lines")], "y"),
    )?;
    let mut r = Report::new(cfg);
    r.set("status", traj.status);
    r.set("t_last", traj.t_last);
    r.set("steps", traj.len() - 1);
    r.set("final_sup", traj.final_sup());
    r.set("boundary_max", traj.boundary_max);
    r.set("tail_max", traj.tail_max);
    blowup_fields(&mut r, &traj);
    r.write(&dir.join("solve_report.txt"))?;
    println!("status = {}, t_last = {}", traj.status, traj.t_last);
    Ok(())
}

struct SweepRow {
    gamma: f64,
    p: f64,
    height: Option<f64>,
    status: Status,
    t_last: f64,
    fit: Option<memheat_core::BlowupReport>,
}

fn sorted(v: &[f64], fallback: f64) -> Vec<f64> {
    if v.is_empty() {
        return vec![fallback];
    }
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    s.dedup();
    s
}

pub fn sweep(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    if cfg.sweep_gamma.is_empty() && cfg.sweep_p.is_empty() && cfg.sweep_height.is_empty() {
        return Err(UsageError("sweep needs at least one of sweep.gamma, sweep.p, sweep.height".into()).into());
    }
    let base_height = match cfg.init {
        InitData::Bump { height, .. } => Some(height),
        _ if !cfg.sweep_height.is_empty() => {
            return Err(UsageError("sweep.height requires init.kind = bump".into()).into())
        }
        _ => None,
    };
    let mut jobs = Vec::new();
    for &g in &sorted(&cfg.sweep_gamma, cfg.gamma) {
        for &p in &sorted(&cfg.sweep_p, cfg.p) {
            match base_height {
                Some(h0) => {
                    for &h in &sorted(&cfg.sweep_height, h0) {
                        jobs.push((g, p, Some(h)));
                    }
                }
                None => jobs.push((g, p, None)),
            }
        }
    }
    let rows: Vec<Result<SweepRow>> = jobs
        .par_iter()
        .map(|&(gamma, p, height)| {
            let mut c = cfg.clone();
            c.gamma = gamma;
            c.p = p;
            if let (Some(h), InitData::Bump { width, .. }) = (height, &cfg.init) {
                c.init = InitData::Bump { height: h, width: *width };
            }
            let traj = simulate(&c)?;
            let fit = if traj.status == Status::BlewUp { analyze_blowup(&traj).ok() } else { None };
            Ok(SweepRow {
                gamma,
                p,
                height,
                status: traj.status,
                t_last: traj.t_last,
                fit,
            })
        })
        .collect();
    let dir = ensure_dir(out)?;
    let mut t = Table::new(&["gamma", "p", "height", "status", "t_last", "t_star", "alpha_hat", "alpha1", "rel_err"]);
    for row in rows {
        let r = row?;
        let opt = |f: Option<f64>| f.map(cell).unwrap_or_default();
        let alpha1 = Params::new(cfg.n, cfg.m, r.gamma, r.p)?.derived().alpha1;
        t.push(vec![
            cell(r.gamma),
            cell(r.p),
            opt(r.height),
            cell(r.status),
            cell(r.t_last),
            opt(r.fit.map(|f| f.t_star)),
            opt(r.fit.map(|f| f.alpha_hat)),
            cell(alpha1),
            opt(r.fit.map(|f| f.rel_err)),
        ]);
    }
    t.write(&dir.join("sweep.csv"))?;
    std::fs::write(
        dir.join("sweep.gp"),
        gnuplot("sweep.csv", "fitted rate by parameter", "gamma", &[(7, "points"), (8, "points")], ""),
    )?;
    let mut r = Report::new(cfg);
    r.set("rows", t.len());
    r.write(&dir.join("sweep_report.txt"))?;
    println!("{} sweep rows", t.len());
    Ok(())
}

pub fn rate(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let traj = simulate(cfg)?;
    if traj.status != Status::BlewUp {
        bail!(crate::CheckFailure(format!(
            "run ended with status {} at t = {}; nothing to fit",
            traj.status, traj.t_last
        )));
    }
    let fit = analyze_blowup(&traj).context("rate fit")?;
    let lb = lower_bound_certificate(&traj, fit.t_star)?;
    let dir = ensure_dir(out)?;

    let mut t = Table::new(&["t", "sup_norm", "tau", "z", "lower_bound"]);
    let g = cfg.gamma;
    let c = 2f64.powf(cfg.p) / ((1.0 - g) * (2.0 - g));
    let implied = (c * 2f64.powf(cfg.p)).powf(-1.0 / (cfg.p - 1.0));
    for (ti, s) in traj.times.iter().zip(&traj.sup_norms) {
        let tau = fit.t_star - ti;
        if tau <= 0.0 || *s <= 0.0 {
            continue;
        }
        t.push(vec![
            cell(ti),
            cell(s),
            cell(tau),
            cell(s.powf(-1.0 / fit.alpha1)),
            cell(implied * tau.powf(-fit.alpha1)),
        ]);
    }
    t.write(&dir.join("rate.csv"))?;
    std::fs::write(
        dir.join("rate.gp"),
        "set datafile separator ','\nset key autotitle columnhead\nset logscale xy\nset xlabel 'T* - t'\n\
         plot 'rate.csv' using 3:2 with points, 'rate.csv' using 3:5 with lines\n",
    )?;

    // rescaling at the times the running max first crosses each decade above M(0)
    let env = running_max(&traj);
    let mut rt = Table::new(&["t0", "m_t0", "t0_plus", "lambda", "phi_origin", "bound_check", "partial"]);
    let mut rescale_ok = true;
    let mut level = env[0].max(1e-300) * 10.0;
    for (i, &m) in env.iter().enumerate() {
        if m < level {
            continue;
        }
        while level <= m {
            level *= 10.0;
        }
        let Ok(d) = rescaled_diagnostics(&traj, traj.times[i], cfg.rate_a) else { continue };
        rescale_ok &= d.phi_origin >= cfg.rate_a && d.bound_check <= 4.0 * cfg.rate_a * 1.05;
        rt.push(vec![
            cell(d.t0),
            cell(d.m_t0),
            cell(d.t0_plus),
            cell(d.lambda),
            cell(d.phi_origin),
            cell(d.bound_check),
            cell(d.partial),
        ]);
    }
    rt.write(&dir.join("rescale.csv"))?;

    let mut r = Report::new(cfg);
    r.set("status", traj.status);
    r.set("t_star", fit.t_star);
    r.set("alpha_hat", fit.alpha_hat);
    r.set("alpha1", fit.alpha1);
    r.set("rel_err", fit.rel_err);
    r.set("fit_points", fit.points);
    r.set("lower_bound_pass_fraction", lb.pass_fraction);
    r.set("lower_bound_last_decade", lb.last_decade_fraction);
    r.set("rescale_rows", rt.len());
    r.set("rescale_pass", rescale_ok);
    r.set("tail_max", traj.tail_max);
    r.write(&dir.join("rate_report.txt"))?;
    println!(
        "t* = {}, alpha_hat = {} (alpha1 = {}, rel err {:.3e})",
        fit.t_star, fit.alpha_hat, fit.alpha1, fit.rel_err
    );
    Ok(())
}

fn regime(k: RegimeKey) -> Regime {
    match k {
        RegimeKey::Subcritical => Regime::Subcritical,
        RegimeKey::Memory => Regime::Memory,
        RegimeKey::Critical => Regime::Critical,
    }
}

pub fn liouville(cfg: &ExperimentConfig, out: &Path) -> Result<()> {
    let params = cfg.params().map_err(UsageError::from)?;
    let grid = cfg.grid().map_err(UsageError::from)?;
    let reg = regime(cfg.regime);
    reg.check(&params).map_err(|e| UsageError(e.to_string()))?;
    let mut spec = ScanSpec::defaults(&params, grid);
    spec.half_steps = cfg.half_steps;
    spec.fixed_radius = cfg.radius;
    spec.k = cfg.k;
    if cfg.sigma > 0.0 {
        spec.sigma = cfg.sigma;
    }
    if cfg.ell > 0 {
        spec.ell = cfg.ell;
    }
    let r_max = cfg
        .horizons
        .iter()
        .map(|&t| regime_radius(reg, &params, &spec, t))
        .fold(0.0, f64::max);
    if 2.0 * r_max >= cfg.half_width {
        return Err(UsageError(format!(
            "test-function support radius {} does not fit in grid.half_width = {}",
            2.0 * r_max,
            cfg.half_width
        ))
        .into());
    }
    let profile = initial_data(&cfg.init, grid, cfg.seed);
    let family = |g: &Grid, horizon: f64, half_steps: usize| {
        SpaceTimeField::new(*g, horizon, half_steps, vec![profile.clone(); 2 * half_steps + 1])
    };
    let table: ScanTable = certificate_scan(&params, reg, &cfg.horizons, &spec, &family)?;

    let dir = ensure_dir(out)?;
    let mut t = Table::new(&[
        "T", "R", "I", "J", "I1", "I2", "J1", "J2", "holder_i1", "holder_j1", "young_i2", "young_j2",
        "rhs_bound", "absorbed_bound", "memory_term", "eq4_lhs", "eq4_rhs",
    ]);
    let mut inequalities = true;
    let tol = 1e-6;
    for r in &table.rows {
        inequalities &= r.i1 <= r.holder_i1 * (1.0 + tol)
            && r.j1 <= r.holder_j1 * (1.0 + tol)
            && r.i2 <= r.young_i2 * (1.0 + tol)
            && r.j2 <= r.young_j2 * (1.0 + tol);
        t.push(
            [
                r.horizon, r.radius, r.i, r.j, r.i1, r.i2, r.j1, r.j2, r.holder_i1, r.holder_j1, r.young_i2,
                r.young_j2, r.rhs_bound, r.absorbed_bound, r.memory_term, r.eq4_lhs, r.eq4_rhs,
            ]
            .iter()
            .map(|v| cell(v))
            .collect(),
        );
    }
    t.write(&dir.join("liouville.csv"))?;
    std::fs::write(
        dir.join("liouville.gp"),
        gnuplot("liouville.csv", "certificate terms", "T", &[(14, "linespoints"), (15, "linespoints")], "xy"),
    )?;
    let mut r = Report::new(cfg);
    r.set("regime", reg.as_str());
    r.set("sigma", spec.sigma);
    r.set("ell", spec.ell);
    r.set("slope", table.slope);
    r.set("predicted_slope", table.predicted);
    r.set("absorbed_slope", table.absorbed_slope);
    r.set("h1_slope", table.h_slopes.0);
    r.set("h2_slope", table.h_slopes.1);
    r.set("inequalities_hold", inequalities);
    if reg == Regime::Critical {
        let t_mid = cfg.horizons[cfg.horizons.len() / 2];
        let ks = [cfg.k, 2.0 * cfg.k, 4.0 * cfg.k, 8.0 * cfg.k];
        let (kb, kh) = critical_k_exponents(&params, t_mid, &ks, &spec)?;
        r.set("k_exponent_b", kb);
        r.set("k_exponent_h", kh);
    }
    r.write(&dir.join("liouville_report.txt"))?;
    println!(
        "{} scan: slope {} (predicted {}), inequalities hold: {}",
        reg.as_str(),
        table.slope,
        table.predicted,
        inequalities
    );
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_field_is_seeded_and_scaled() {
        let g = Grid::new(2, 5.0, 32).unwrap();
        let a = random_field(g, 7, 0.8);
        let b = random_field(g, 7, 0.8);
        let c = random_field(g, 8, 0.8);
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!((a.sup_norm() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn sorted_ranges_fall_back_to_scalar() {
        assert_eq!(sorted(&[], 0.5), vec![0.5]);
        assert_eq!(sorted(&[3.0, 2.0, 3.0], 0.5), vec![2.0, 3.0]);
    }
}
