//! Test functions `φ_R(x) w_i(t)` and the quantitative certificate of the Liouville argument:
//! the functionals `I, J, Ĩ, J̃`, the four right-hand terms `I₁, I₂, J₁, J₂`, their Hölder
//! and Young bounds, and decay scans in the three exponent regimes.

use crate::error::{Error, Result};
use crate::fractional::{sigma_min, w_profile_eval, ProfileKind, ProfileOrder, WProfile};
use crate::grid::{Grid, GridFunction};
use crate::params::Params;
use crate::quadrature::{fit_line, trapezoid_weights};
use crate::solver::Snapshot;
use crate::special::gamma;

/// Points where `φ_R` falls below this are cut from the singular weights.
pub const WEIGHT_CUT: f64 = 1e-8;

fn g(s: f64) -> f64 {
    if s > 0.0 {
        (-1.0 / s).exp()
    } else {
        0.0
    }
}

/// Smooth radial profile: 1 on `r ≤ 1`, 0 on `r ≥ 2`.
pub fn bump_profile(r: f64) -> f64 {
    if r <= 1.0 {
        1.0
    } else if r >= 2.0 {
        0.0
    } else {
        let a = g(2.0 - r);
        a / (a + g(r - 1.0))
    }
}

/// `φ_R = φ^ℓ(x/R)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BumpSpec {
    pub ell: u32,
    pub radius: f64,
    pub m: usize,
}

impl BumpSpec {
    pub fn new(ell: u32, radius: f64, m: usize) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::Domain(format!("bump radius must be positive, got {radius}")));
        }
        if m < 1 {
            return Err(Error::Domain("polyharmonic order must be at least 1".into()));
        }
        Ok(Self { ell, radius, m })
    }

    /// Checks `ℓ > 2mp/(p-1)`.
    pub fn check_power(&self, p: f64) -> Result<()> {
        let need = 2.0 * self.m as f64 * p / (p - 1.0);
        if (self.ell as f64) <= need {
            return Err(Error::Domain(format!(
                "bump power ℓ = {} must exceed 2mp/(p-1) = {need}",
                self.ell
            )));
        }
        Ok(())
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt() / self.radius;
        bump_profile(r).powi(self.ell as i32)
    }

    pub fn sample(&self, grid: &Grid) -> GridFunction {
        GridFunction::from_fn(*grid, |x| self.value(x))
    }
}

/// `ℓ = 2 ceil(mp/(p-1)) + 1`.
pub fn default_ell(m: usize, p: f64) -> u32 {
    2 * (m as f64 * p / (p - 1.0)).ceil() as u32 + 1
}

fn laplacian_at(f: &dyn Fn(&[f64]) -> f64, x: &[f64], h: f64, order: usize) -> f64 {
    if order == 0 {
        return f(x);
    }
    let mut y = x.to_vec();
    let centre = laplacian_at(f, x, h, order - 1);
    let mut acc = 0.0;
    for a in 0..x.len() {
        y[a] = x[a] + h;
        let up = laplacian_at(f, &y, h, order - 1);
        y[a] = x[a] - h;
        let dn = laplacian_at(f, &y, h, order - 1);
        y[a] = x[a];
        acc += up + dn - 2.0 * centre;
    }
    acc / (h * h)
}

/// `φ_R(x)` and the centered-difference `Δ^m φ_R(x)` with step `h`.
pub fn bump_eval(spec: &BumpSpec, x: &[f64], h: f64) -> (f64, f64) {
    let f = |y: &[f64]| spec.value(y);
    (spec.value(x), laplacian_at(&f, x, h, spec.m))
}

/// Periodic `Δ_h^m` on the grid by iterated second differences.
pub fn discrete_polyharmonic(f: &GridFunction, m: usize) -> GridFunction {
    let grid = *f.grid();
    let n = grid.points_per_axis();
    let h2 = grid.spacing().powi(2);
    let dim = grid.dim();
    let mut cur = f.values().to_vec();
    let mut next = vec![0.0; cur.len()];
    for _ in 0..m {
        next.iter_mut().for_each(|v| *v = 0.0);
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            for (flat, out) in next.iter_mut().enumerate() {
                let j = (flat / stride) % n;
                let up = if j + 1 == n { flat + stride - n * stride } else { flat + stride };
                let dn = if j == 0 { flat + n * stride - stride } else { flat - stride };
                *out += (cur[up] + cur[dn] - 2.0 * cur[flat]) / h2;
            }
        }
        std::mem::swap(&mut cur, &mut next);
    }
    GridFunction::new(grid, cur).expect("same grid")
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundCheck {
    /// `max |Δ^m(φ^ℓ)| / φ^{ℓ-2m}` over `1 ≤ |x| ≤ 2`.
    pub c_hat: f64,
    /// `∫ φ_R^{-1/(p-1)} |Δ^m φ_R|^{p/(p-1)}` over `φ_R ≥ 1e-8`.
    pub l3_value: f64,
    /// Same integral at `2R` divided by the value at `R`.
    pub l3_ratio: f64,
    /// `2^{n - 2mp/(p-1)}`.
    pub l3_predicted: f64,
}

fn l3_integral(grid: &Grid, spec: &BumpSpec, p: f64) -> f64 {
    let phi = spec.sample(grid);
    let lap = discrete_polyharmonic(&phi, spec.m);
    let q = p / (p - 1.0);
    let sum: f64 = phi
        .values()
        .iter()
        .zip(lap.values())
        .filter(|(f, _)| **f >= WEIGHT_CUT)
        .map(|(f, d)| f.powf(-1.0 / (p - 1.0)) * d.abs().powf(q))
        .sum();
    sum * grid.cell_volume()
}

/// Checks of the test-function bounds on a grid of `points` per axis: the pointwise ratio `C_hat` at `R = 1`
/// on `[-3, 3)^n`, and the `L3` integral at `R` and `2R` on a common box `[-6R, 6R)^n`.
pub fn polyharmonic_bound_check(spec: &BumpSpec, n: usize, p: f64, points: usize) -> Result<BoundCheck> {
    spec.check_power(p)?;
    let unit = BumpSpec::new(spec.ell, 1.0, spec.m)?;
    let grid = Grid::new(n, 3.0, points)?;
    let phi = unit.sample(&grid);
    let lap = discrete_polyharmonic(&phi, spec.m);
    let base = GridFunction::from_fn(grid, |x| bump_profile(x.iter().map(|v| v * v).sum::<f64>().sqrt()));
    let mut c_hat = 0.0f64;
    for i in 0..grid.len() {
        let r = grid.radius(i);
        let b = base.values()[i];
        if (1.0..=2.0).contains(&r) && phi.values()[i] >= WEIGHT_CUT {
            c_hat = c_hat.max(lap.values()[i].abs() / b.powi(spec.ell as i32 - 2 * spec.m as i32));
        }
    }
    let big = Grid::new(n, 6.0 * spec.radius, points)?;
    let l3_value = l3_integral(&big, spec, p);
    let double = BumpSpec::new(spec.ell, 2.0 * spec.radius, spec.m)?;
    let l3_ratio = l3_integral(&big, &double, p) / l3_value;
    Ok(BoundCheck {
        c_hat,
        l3_value,
        l3_ratio,
        l3_predicted: 2f64.powf(n as f64 - 2.0 * spec.m as f64 * p / (p - 1.0)),
    })
}

/// Field `v` sampled at `2M + 1` uniform times on `[-T, T]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    horizon: f64,
    half_steps: usize,
    values: Vec<GridFunction>,
}

impl SpaceTimeField {
    pub fn new(grid: Grid, horizon: f64, half_steps: usize, values: Vec<GridFunction>) -> Result<Self> {
        if !(horizon > 0.0) {
            return Err(Error::Domain(format!("horizon must be positive, got {horizon}")));
        }
        if half_steps < 1 || values.len() != 2 * half_steps + 1 {
            return Err(Error::Domain(format!(
                "expected {} time slices, got {}",
                2 * half_steps + 1,
                values.len()
            )));
        }
        if values.iter().any(|v| v.grid() != &grid || !v.is_finite()) {
            return Err(Error::Domain("slices must be finite and live on the field grid".into()));
        }
        Ok(Self { grid, horizon, half_steps, values })
    }

    pub fn from_fn(grid: Grid, horizon: f64, half_steps: usize, f: impl Fn(f64, &[f64]) -> f64) -> Result<Self> {
        let values = (0..=2 * half_steps)
            .map(|k| {
                let t = -horizon + horizon * k as f64 / half_steps as f64;
                GridFunction::from_fn(grid, |x| f(t, x))
            })
            .collect();
        Self::new(grid, horizon, half_steps, values)
    }

    pub fn zeros(grid: Grid, horizon: f64, half_steps: usize) -> Self {
        Self {
            grid,
            horizon,
            half_steps,
            values: vec![GridFunction::zeros(grid); 2 * half_steps + 1],
        }
    }

    /// Snapshots of a run on `[t_s, t_s + 2T]` shifted to `[-T, T]`, linearly interpolated in time.
    pub fn from_snapshots(snapshots: &[Snapshot], start: f64, horizon: f64, half_steps: usize) -> Result<Self> {
        let grid = *snapshots
            .first()
            .ok_or_else(|| Error::Domain("no snapshots".into()))?
            .u
            .grid();
        let end = start + 2.0 * horizon;
        if snapshots[0].t > start + 1e-12 || snapshots.last().unwrap().t < end - 1e-12 {
            return Err(Error::Domain(format!(
                "snapshots cover [{}, {}], need [{start}, {end}]",
                snapshots[0].t,
                snapshots.last().unwrap().t
            )));
        }
        let mut values = Vec::with_capacity(2 * half_steps + 1);
        let mut i = 0;
        for k in 0..=2 * half_steps {
            let t = (start + horizon * k as f64 / half_steps as f64).min(snapshots.last().unwrap().t);
            while i + 1 < snapshots.len() && snapshots[i + 1].t < t {
                i += 1;
            }
            let a = &snapshots[i];
            let b = &snapshots[(i + 1).min(snapshots.len() - 1)];
            let w = if b.t > a.t { ((t - a.t) / (b.t - a.t)).clamp(0.0, 1.0) } else { 0.0 };
            let mut v = a.u.map(|x| (1.0 - w) * x);
            v.add_scaled(w, &b.u);
            values.push(v);
        }
        Self::new(grid, horizon, half_steps, values)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn half_steps(&self) -> usize {
        self.half_steps
    }

    pub fn time(&self, k: usize) -> f64 {
        -self.horizon + self.horizon * k as f64 / self.half_steps as f64
    }

    pub fn slices(&self) -> &[GridFunction] {
        &self.values
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.sup_norm()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    /// `δ > 0`, `R = T^{1/(2m)}`.
    Subcritical,
    /// `δ = 0`, `R = (T/K)^{1/(2m)}`.
    Critical,
    /// `p < 1/γ`, fixed `R`.
    Memory,
}

impl Regime {
    pub fn as_str(&self) -> &'static str {
        match self {
            Regime::Subcritical => "subcritical",
            Regime::Critical => "critical",
            Regime::Memory => "memory",
        }
    }

    /// Checks the regime against the parameters.
    pub fn check(&self, params: &Params) -> Result<()> {
        let d = params.derived().delta;
        let ok = match self {
            Regime::Subcritical => d > 0.0,
            Regime::Critical => d.abs() < 1e-9,
            Regime::Memory => params.p() < 1.0 / params.gamma(),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "regime {} inconsistent with parameters: δ = {d}, p = {}, 1/γ = {}",
                self.as_str(),
                params.p(),
                1.0 / params.gamma()
            )))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateReport {
    pub horizon: f64,
    pub radius: f64,
    pub sigma: f64,
    pub ell: u32,
    pub i: f64,
    pub j: f64,
    pub i_tilde: f64,
    pub j_tilde: f64,
    pub i1: f64,
    pub i2: f64,
    pub j1: f64,
    pub j2: f64,
    /// `(∫ w^{-1/(p-1)}|D^α w|^q dt · ∫ φ_R^{-1/(p-1)}|Δ^m φ_R|^q dx)^{1/q}` for `w₁`, `w₂`.
    pub h1: f64,
    pub h2: f64,
    /// `∫ w^{-1/(p-1)}|D^{1+α} w|^q dt · ∫ φ_R dx` for `w₁`, `w₂`.
    pub b1: f64,
    pub b2: f64,
    /// Bound on the contributions of `I₁ + J₁` from points cut by `φ_R < 1e-8`.
    pub excess: f64,
    /// `Ĩ^{1/p} h₁ + excess₁`.
    pub holder_i1: f64,
    pub holder_j1: f64,
    /// `ε I + C_ε b₁` with `ε = Γ(α)/2`.
    pub young_i2: f64,
    pub young_j2: f64,
    /// Right side of the bound on `I + J` before absorbing `Ĩ, J̃`.
    pub rhs_bound: f64,
    /// `v`-independent bound after absorbing `Ĩ ≤ I`, `J̃ ≤ J`.
    pub absorbed_bound: f64,
    /// Memory-term part `C_ε'(h₁^q + h₂^q)` of the absorbed bound.
    pub memory_term: f64,
    pub eq4_lhs: f64,
    pub eq4_rhs: f64,
    pub epsilon: f64,
}

/// `C_ε` in `ab ≤ ε a^p + C_ε b^{p/(p-1)}`.
pub fn young_constant(eps: f64, p: f64) -> f64 {
    (p - 1.0) / p * (p * eps).powf(-1.0 / (p - 1.0))
}

/// Time-direction factors of the certificate for one profile, on the given trapezoid nodes.
struct TimeFactors {
    w: Vec<f64>,
    d_alpha: Vec<f64>,
    d_one: Vec<f64>,
    /// `Σ ω w^{-1/(p-1)} |D^α w|^q`
    a_alpha: f64,
    /// `Σ ω w^{-1/(p-1)} |D^{1+α} w|^q`
    a_one: f64,
}

fn time_factors(w: &WProfile, alpha: f64, p: f64, nodes: &[f64], weights: &[f64]) -> Result<TimeFactors> {
    let q = p / (p - 1.0);
    let mut out = TimeFactors {
        w: Vec::with_capacity(nodes.len()),
        d_alpha: Vec::with_capacity(nodes.len()),
        d_one: Vec::with_capacity(nodes.len()),
        a_alpha: 0.0,
        a_one: 0.0,
    };
    for (&t, &om) in nodes.iter().zip(weights) {
        let wv = w_profile_eval(w, alpha, t, ProfileOrder::Value)?;
        let da = w_profile_eval(w, alpha, t, ProfileOrder::Alpha)?;
        let d1 = w_profile_eval(w, alpha, t, ProfileOrder::OnePlusAlpha)?;
        if wv > 0.0 {
            out.a_alpha += om * (q * da.abs().ln() - wv.ln() / (p - 1.0)).exp();
            out.a_one += om * (q * d1.abs().ln() - wv.ln() / (p - 1.0)).exp();
        }
        out.w.push(wv);
        out.d_alpha.push(da);
        out.d_one.push(d1);
    }
    Ok(out)
}

/// Evaluates the certificate functionals for `v` with test functions `w_i(t) φ_R(x)`.
pub fn certificate_terms(
    v: &SpaceTimeField,
    params: &Params,
    radius: f64,
    sigma: f64,
    ell: u32,
) -> Result<CertificateReport> {
    let alpha = params.alpha();
    let p = params.p();
    let q = p / (p - 1.0);
    let m = params.m();
    if v.grid().dim() != params.n() {
        return Err(Error::Domain("field grid dimension does not match n".into()));
    }
    if sigma < sigma_min(alpha, p) {
        return Err(Error::Domain(format!(
            "σ = {sigma} is below σ_min = {}",
            sigma_min(alpha, p)
        )));
    }
    let spec = BumpSpec::new(ell, radius, m)?;
    spec.check_power(p)?;
    let grid = *v.grid();
    let tt = v.horizon();
    let ms = v.half_steps();

    let phi = spec.sample(&grid);
    let lap = discrete_polyharmonic(&phi, m);
    let hx = grid.cell_volume();
    let mut b_space = 0.0;
    let mut phi_mass = 0.0;
    let mut cut_lap = 0.0;
    let mut support = vec![false; grid.len()];
    let mut cut = vec![false; grid.len()];
    for i in 0..grid.len() {
        let f = phi.values()[i];
        let d = lap.values()[i].abs();
        phi_mass += f * hx;
        if d > 0.0 {
            if f >= WEIGHT_CUT {
                support[i] = true;
                b_space += hx * (q * d.ln() - f.ln() / (p - 1.0)).exp();
            } else {
                cut[i] = true;
                cut_lap += hx * d;
            }
        }
    }

    let w1 = WProfile::new(ProfileKind::Decaying, sigma, tt)?;
    let w2 = WProfile::new(ProfileKind::Growing, sigma, tt)?;
    let omega = trapezoid_weights(ms, tt / ms as f64);
    let pos: Vec<f64> = (0..=ms).map(|k| v.time(ms + k)).collect();
    let neg: Vec<f64> = (0..=ms).map(|k| v.time(k)).collect();
    let f1 = time_factors(&w1, alpha, p, &pos, &omega)?;
    let f2 = time_factors(&w2, alpha, p, &neg, &omega)?;

    // spatial reductions per time slice
    struct Slice {
        mass_p: f64,
        mass_p_tilde: f64,
        abs_phi: f64,
        abs_lap: f64,
        abs_lap_cut: f64,
        sup: f64,
    }
    let reduce = |u: &GridFunction| {
        let mut s = Slice {
            mass_p: 0.0,
            mass_p_tilde: 0.0,
            abs_phi: 0.0,
            abs_lap: 0.0,
            abs_lap_cut: 0.0,
            sup: 0.0,
        };
        for (i, &x) in u.values().iter().enumerate() {
            let a = x.abs();
            if a == 0.0 {
                continue;
            }
            let f = phi.values()[i];
            let ap = a.powf(p);
            s.mass_p += ap * f;
            s.abs_phi += a * f;
            if support[i] {
                s.mass_p_tilde += ap * f;
                s.abs_lap += a * lap.values()[i].abs();
            } else if cut[i] {
                s.abs_lap_cut += a * lap.values()[i].abs();
            }
            s.sup = s.sup.max(a);
        }
        s.mass_p *= hx;
        s.mass_p_tilde *= hx;
        s.abs_phi *= hx;
        s.abs_lap *= hx;
        s.abs_lap_cut *= hx;
        s
    };

    let mut acc = [0.0f64; 12];
    for k in 0..=ms {
        let om = omega[k];
        let sp = reduce(&v.slices()[ms + k]);
        acc[0] += om * f1.w[k] * sp.mass_p;
        acc[1] += om * f1.w[k] * sp.mass_p_tilde;
        acc[2] += om * f1.d_alpha[k].abs() * sp.abs_lap;
        acc[3] += om * f1.d_one[k].abs() * sp.abs_phi;
        acc[4] += om * f1.d_alpha[k].abs() * sp.abs_lap_cut;
        let sn = reduce(&v.slices()[k]);
        acc[5] += om * f2.w[k] * sn.mass_p;
        acc[6] += om * f2.w[k] * sn.mass_p_tilde;
        acc[7] += om * f2.d_alpha[k].abs() * sn.abs_lap;
        acc[8] += om * f2.d_one[k].abs() * sn.abs_phi;
        acc[9] += om * f2.d_alpha[k].abs() * sn.abs_lap_cut;
        acc[10] = acc[10].max(sp.sup).max(sn.sup);
        acc[11] += om * (f1.d_alpha[k].abs() + f2.d_alpha[k].abs());
    }
    let [i, i_tilde, i1_in, i2, i1_cut, j, j_tilde, j1_in, j2, j1_cut, vsup, dint] = acc;
    let i1 = i1_in + i1_cut;
    let j1 = j1_in + j1_cut;
    let excess = vsup * dint * cut_lap;

    let h1 = (f1.a_alpha * b_space).powf(1.0 / q);
    let h2 = (f2.a_alpha * b_space).powf(1.0 / q);
    let b1 = f1.a_one * phi_mass;
    let b2 = f2.a_one * phi_mass;

    let ga = gamma(alpha);
    let eps = 0.5 * ga;
    let c_eps = young_constant(eps, p);
    let eps2 = 0.5 * (ga - eps);
    let c_eps2 = young_constant(eps2, p);
    let rhs_bound = 2.0 / ga
        * (c_eps * (b1 + b2) + i_tilde.powf(1.0 / p) * h1 + j_tilde.powf(1.0 / p) * h2 + excess);
    let memory_term = c_eps2 * (h1.powf(q) + h2.powf(q));
    let absorbed_bound = 2.0 / (ga - eps) * (c_eps * (b1 + b2) + memory_term + excess);

    Ok(CertificateReport {
        horizon: tt,
        radius,
        sigma,
        ell,
        i,
        j,
        i_tilde,
        j_tilde,
        i1,
        i2,
        j1,
        j2,
        h1,
        h2,
        b1,
        b2,
        excess,
        holder_i1: i_tilde.powf(1.0 / p) * h1 + vsup * cut_lap * f1.d_alpha.iter().zip(&omega).map(|(d, o)| d.abs() * o).sum::<f64>(),
        holder_j1: j_tilde.powf(1.0 / p) * h2 + vsup * cut_lap * f2.d_alpha.iter().zip(&omega).map(|(d, o)| d.abs() * o).sum::<f64>(),
        young_i2: eps * i + c_eps * b1,
        young_j2: eps * j + c_eps * b2,
        rhs_bound,
        absorbed_bound,
        memory_term,
        eq4_lhs: ga * (i + j),
        eq4_rhs: i1 + i2 + j1 + j2,
        epsilon: eps,
    })
}

/// Scan settings shared by every horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanSpec {
    pub grid: Grid,
    pub half_steps: usize,
    pub sigma: f64,
    pub ell: u32,
    /// Fixed radius for the memory regime.
    pub fixed_radius: f64,
    /// `K` in the critical coupling `R = (T/K)^{1/(2m)}`.
    pub k: f64,
}

impl ScanSpec {
    pub fn defaults(params: &Params, grid: Grid) -> Self {
        Self {
            grid,
            half_steps: 1024,
            sigma: sigma_min(params.alpha(), params.p()),
            ell: default_ell(params.m(), params.p()),
            fixed_radius: 1.0,
            k: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanTable {
    pub regime: Regime,
    pub rows: Vec<CertificateReport>,
    /// Fitted log-log slope of the regime's decaying quantity against `T`.
    pub slope: f64,
    pub predicted: f64,
    /// Slope of the full absorbed bound.
    pub absorbed_slope: f64,
    /// Slopes of `h₁`, `h₂` against `T`.
    pub h_slopes: (f64, f64),
}

/// `R(T)` under the regime's coupling.
pub fn regime_radius(regime: Regime, params: &Params, spec: &ScanSpec, horizon: f64) -> f64 {
    let e = 1.0 / (2.0 * params.m() as f64);
    match regime {
        Regime::Subcritical => horizon.powf(e),
        Regime::Critical => (horizon / spec.k).powf(e),
        Regime::Memory => spec.fixed_radius,
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> Result<f64> {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    Ok(fit_line(&lx, &ly)?.slope)
}

/// Certificate at each horizon under the regime's `R(T)`; fits the decay slope of the
/// absorbed bound (subcritical: `-δ`), or of its memory term (memory: `1 - αp/(p-1)`).
/// In the critical regime the slope is the `T`-exponent of the absorbed bound, predicted 0.
pub fn certificate_scan(
    params: &Params,
    regime: Regime,
    horizons: &[f64],
    spec: &ScanSpec,
    family: &dyn Fn(&Grid, f64, usize) -> Result<SpaceTimeField>,
) -> Result<ScanTable> {
    regime.check(params)?;
    if horizons.len() < 2 {
        return Err(Error::WindowTooShort { got: horizons.len(), need: 2 });
    }
    let mut rows = Vec::with_capacity(horizons.len());
    for &tt in horizons {
        let r = regime_radius(regime, params, spec, tt);
        let v = family(&spec.grid, tt, spec.half_steps)?;
        rows.push(certificate_terms(&v, params, r, spec.sigma, spec.ell)?);
    }
    let alpha = params.alpha();
    let q = params.conjugate();
    let absorbed: Vec<f64> = rows.iter().map(|r| r.absorbed_bound).collect();
    let absorbed_slope = slope(horizons, &absorbed)?;
    let (slope_v, predicted) = match regime {
        Regime::Subcritical => (absorbed_slope, -params.derived().delta),
        Regime::Critical => (absorbed_slope, 0.0),
        Regime::Memory => {
            let mem: Vec<f64> = rows.iter().map(|r| r.memory_term).collect();
            (slope(horizons, &mem)?, 1.0 - alpha * q)
        }
    };
    let h1: Vec<f64> = rows.iter().map(|r| r.h1).collect();
    let h2: Vec<f64> = rows.iter().map(|r| r.h2).collect();
    Ok(ScanTable {
        regime,
        rows,
        slope: slope_v,
        predicted,
        absorbed_slope,
        h_slopes: (slope(horizons, &h1)?, slope(horizons, &h2)?),
    })
}

/// Measured `K`-exponents of the two bound components at fixed `T` in the critical regime:
/// `(b-term, h-term)`, where the `h`-term is `h₁`.
pub fn critical_k_exponents(params: &Params, horizon: f64, ks: &[f64], spec: &ScanSpec) -> Result<(f64, f64)> {
    Regime::Critical.check(params)?;
    let mut b = Vec::new();
    let mut h = Vec::new();
    for &k in ks {
        let s = ScanSpec { k, ..*spec };
        let r = regime_radius(Regime::Critical, params, &s, horizon);
        let v = SpaceTimeField::zeros(spec.grid, horizon, spec.half_steps);
        let rep = certificate_terms(&v, params, r, spec.sigma, spec.ell)?;
        b.push(rep.b1 + rep.b2);
        h.push(rep.h1);
    }
    Ok((slope(ks, &b)?, slope(ks, &h)?))
}
