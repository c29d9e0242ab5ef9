//! Riemann-Liouville fractional integrals and derivatives on uniform time grids,
//! plus closed forms for the power profiles `w₁(t) = (1 - t/T)^σ`, `w₂(t) = (1 + t/T)^σ`.
//!
//! Integrals use first-order product integration: the power kernel is integrated exactly
//! against the piecewise-linear interpolant of the samples. Derivatives differentiate
//! `I^{1-α} f` with second-order finite differences; the inner integral additionally
//! carries starting corrections that make it exact on `(t-a)^α` and `(t-a)^{1+α}`, the
//! leading terms of functions in the range of `I^α`.

use crate::error::{Error, Result};
use crate::quadrature::{fit_line, integrate_adaptive, linear_product_weights};
use crate::special::{gamma, gamma_ratio};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `I^α_{a|t}`, `D^α_{a|t}`
    Left,
    /// `I^α_{t|b}`, `D^α_{t|b}`
    Right,
}

/// Uniform grid `a = t_0 < ... < t_M = b`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    a: f64,
    b: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(a: f64, b: f64, steps: usize) -> Result<Self> {
        if !(a < b) || !a.is_finite() || !b.is_finite() {
            return Err(Error::Domain(format!("time grid needs a < b, got [{a}, {b}]")));
        }
        if steps < 2 {
            return Err(Error::Domain(format!("time grid needs at least 2 steps, got {steps}")));
        }
        Ok(Self { a, b, steps })
    }

    pub fn start(&self) -> f64 {
        self.a
    }

    pub fn end(&self) -> f64 {
        self.b
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / self.steps as f64
    }

    pub fn node(&self, k: usize) -> f64 {
        if k == self.steps {
            self.b
        } else {
            self.a + k as f64 * self.step()
        }
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..=self.steps).map(|k| self.node(k)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..=self.steps).map(|k| f(self.node(k))).collect()
    }
}

fn check_order(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("fractional order must lie in (0,1), got {alpha}")))
    }
}

fn check_samples(grid: &TimeGrid, f: &[f64]) -> Result<()> {
    if f.len() != grid.steps + 1 {
        return Err(Error::Domain(format!(
            "expected {} samples, got {}",
            grid.steps + 1,
            f.len()
        )));
    }
    if f.iter().any(|v| !v.is_finite()) {
        return Err(Error::Domain("samples must be finite".into()));
    }
    Ok(())
}

/// Left-sided product integration `∫_a^{t_k} (t_k - s)^{order-1} f(s) ds / Γ(order)` at every node.
fn left_product_integral(h: f64, f: &[f64], order: f64) -> Vec<f64> {
    let m = f.len() - 1;
    let kappa = order - 1.0;
    // weights only depend on the node distance
    let w: Vec<(f64, f64)> = (0..m)
        .map(|d| linear_product_weights(d as f64 * h, h, kappa))
        .collect();
    let norm = 1.0 / gamma(order);
    let mut out = vec![0.0; m + 1];
    for k in 1..=m {
        let mut acc = 0.0;
        for j in 0..k {
            let (lo, hi) = w[k - j - 1];
            acc += lo * f[j] + hi * f[j + 1];
        }
        out[k] = acc * norm;
    }
    out
}

/// Product integration plus starting weights that make the rule exact on `(t-a)^ν`
/// for every `ν` in `singular` (and still exact on `1`, `t`).
fn left_corrected_integral(h: f64, f: &[f64], order: f64, singular: &[f64]) -> Vec<f64> {
    let m = f.len() - 1;
    let mut base = left_product_integral(h, f, order);
    let mut exps: Vec<f64> = vec![0.0, 1.0];
    for &nu in singular {
        let near_int = (nu - nu.round()).abs() < 1e-3;
        if nu > 0.0 && !near_int && exps.iter().all(|e| (e - nu).abs() > 1e-3) {
            exps.push(nu);
        }
    }
    let q = exps.len();
    if q == 2 || m + 1 < q {
        return base;
    }
    // exactness residuals of the base rule on each singular monomial
    let residuals: Vec<Vec<f64>> = exps[2..]
        .iter()
        .map(|&nu| {
            let samples: Vec<f64> = (0..=m).map(|k| (k as f64 * h).powf(nu)).collect();
            let approx = left_product_integral(h, &samples, order);
            let c = gamma_ratio(nu + 1.0, nu + 1.0 + order);
            (0..=m)
                .map(|k| c * (k as f64 * h).powf(nu + order) - approx[k])
                .collect()
        })
        .collect();
    // A[i][j] = t_j^{exps[i]}, j = 0..q-1
    let mat: Vec<Vec<f64>> = exps
        .iter()
        .map(|&nu| (0..q).map(|j| if j == 0 && nu == 0.0 { 1.0 } else { (j as f64 * h).powf(nu) }).collect())
        .collect();
    for k in 1..=m {
        let mut rhs = vec![0.0; q];
        for (i, r) in residuals.iter().enumerate() {
            rhs[i + 2] = r[k];
        }
        let c = solve_dense(mat.clone(), rhs);
        base[k] += c.iter().zip(f).map(|(c, v)| c * v).sum::<f64>();
    }
    base
}

/// Gaussian elimination with partial pivoting for tiny dense systems.
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Vec<f64> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let f = a[row][col] / a[col][col];
            for k in col..n {
                a[row][k] -= f * a[col][k];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|k| a[row][k] * x[k]).sum();
        x[row] = (b[row] - s) / a[row][row];
    }
    x
}

fn reversed(v: &[f64]) -> Vec<f64> {
    v.iter().rev().copied().collect()
}

/// Riemann-Liouville fractional integral of order `alpha` at every grid node.
pub fn rl_integral(grid: &TimeGrid, f: &[f64], alpha: f64, side: Side) -> Result<Vec<f64>> {
    check_order(alpha)?;
    check_samples(grid, f)?;
    let h = grid.step();
    Ok(match side {
        Side::Left => left_product_integral(h, f, alpha),
        Side::Right => reversed(&left_product_integral(h, &reversed(f), alpha)),
    })
}

/// Second-order finite-difference derivative on a uniform grid.
fn differentiate(h: f64, g: &[f64]) -> Vec<f64> {
    let m = g.len() - 1;
    let mut d = vec![0.0; m + 1];
    d[0] = (-3.0 * g[0] + 4.0 * g[1] - g[2]) / (2.0 * h);
    d[m] = (3.0 * g[m] - 4.0 * g[m - 1] + g[m - 2]) / (2.0 * h);
    for k in 1..m {
        d[k] = (g[k + 1] - g[k - 1]) / (2.0 * h);
    }
    d
}

fn left_derivative(h: f64, f: &[f64], alpha: f64) -> Vec<f64> {
    let g = left_corrected_integral(h, f, 1.0 - alpha, &[alpha, 1.0 + alpha]);
    differentiate(h, &g)
}

/// Riemann-Liouville fractional derivative `D^α = ±d/dt I^{1-α}` at every grid node.
pub fn rl_derivative(grid: &TimeGrid, f: &[f64], alpha: f64, side: Side) -> Result<Vec<f64>> {
    check_order(alpha)?;
    check_samples(grid, f)?;
    if grid.steps < 4 {
        return Err(Error::Domain(format!(
            "grid too coarse for differentiation: {} steps, need at least 4",
            grid.steps
        )));
    }
    let h = grid.step();
    Ok(match side {
        Side::Left => left_derivative(h, f, alpha),
        // D_{t|b} f(t) = (D_{0|τ} f̃)(b - t) with f̃(τ) = f(b - τ)
        Side::Right => reversed(&left_derivative(h, &reversed(f), alpha)),
    })
}

/// Smallest profile exponent keeping every closed-form exponent positive:
/// `ceil((1+α) p/(p-1)) + 2`.
pub fn sigma_min(alpha: f64, p: f64) -> f64 {
    ((1.0 + alpha) * p / (p - 1.0)).ceil() + 2.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `w₁(t) = (1 - t/T)^σ` on `[0, T]`
    Decaying,
    /// `w₂(t) = (1 + t/T)^σ` on `[-T, 0]`
    Growing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileOrder {
    Value,
    Alpha,
    OnePlusAlpha,
}

/// A power profile `w₁` or `w₂` with exponent `σ` and horizon `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WProfile {
    kind: ProfileKind,
    sigma: f64,
    horizon: f64,
}

impl WProfile {
    pub fn new(kind: ProfileKind, sigma: f64, horizon: f64) -> Result<Self> {
        if !(sigma > 1.0) || !sigma.is_finite() {
            return Err(Error::Domain(format!("profile exponent must exceed 1, got {sigma}")));
        }
        if !(horizon > 0.0) || !horizon.is_finite() {
            return Err(Error::Domain(format!("profile horizon must be positive, got {horizon}")));
        }
        Ok(Self { kind, sigma, horizon })
    }

    /// Profile with `σ = σ_min(α, p)`.
    pub fn minimal(kind: ProfileKind, alpha: f64, p: f64, horizon: f64) -> Result<Self> {
        Self::new(kind, sigma_min(alpha, p), horizon)
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    /// `[0, T]` for `w₁`, `[-T, 0]` for `w₂`.
    pub fn domain(&self) -> (f64, f64) {
        match self.kind {
            ProfileKind::Decaying => (0.0, self.horizon),
            ProfileKind::Growing => (-self.horizon, 0.0),
        }
    }

    /// Distance variable `1 ∓ t/T ∈ [0, 1]`.
    fn base(&self, t: f64) -> f64 {
        let b = match self.kind {
            ProfileKind::Decaying => 1.0 - t / self.horizon,
            ProfileKind::Growing => 1.0 + t / self.horizon,
        };
        b.clamp(0.0, 1.0)
    }

    /// Prefactor `K` and exponent `e` of the closed form `K T^{-order} base^e`.
    pub fn closed_form(&self, alpha: f64, order: ProfileOrder) -> (f64, f64, f64) {
        let s = self.sigma;
        match order {
            ProfileOrder::Value => (1.0, 0.0, s),
            ProfileOrder::Alpha => (gamma_ratio(s + 1.0, s + 1.0 - alpha), alpha, s - alpha),
            ProfileOrder::OnePlusAlpha => (gamma_ratio(s + 1.0, s - alpha), 1.0 + alpha, s - alpha - 1.0),
        }
    }
}

/// Closed-form value of the profile or of its order-`α` / `1+α` derivative.
///
/// For `w₁` these are the right-sided derivatives `D_{t|T}`; the `w₂` forms mirror them
/// about `t = 0`.
pub fn w_profile_eval(w: &WProfile, alpha: f64, t: f64, order: ProfileOrder) -> Result<f64> {
    check_order(alpha)?;
    let (lo, hi) = w.domain();
    let slack = 1e-12 * w.horizon;
    if !(t >= lo - slack && t <= hi + slack) {
        return Err(Error::Domain(format!("t = {t} outside profile domain [{lo}, {hi}]")));
    }
    let (k, tpow, e) = w.closed_form(alpha, order);
    Ok(k * w.horizon.powf(-tpow) * w.base(t).powf(e))
}

/// The weighted profile integral computed in closed form and by adaptive quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedIntegral {
    pub closed_form: f64,
    pub quadrature: f64,
    pub discrepancy: f64,
    /// Exponent of `T` in the closed form, `1 - order·p/(p-1)`.
    pub time_exponent: f64,
}

/// `∫ w^{-1/(p-1)} |D^{order} w|^{p/(p-1)} dt` over the profile domain.
pub fn weighted_profile_integral(
    w: &WProfile,
    alpha: f64,
    p: f64,
    order: ProfileOrder,
) -> Result<WeightedIntegral> {
    check_order(alpha)?;
    if !(p > 1.0) {
        return Err(Error::Domain(format!("p must exceed 1, got {p}")));
    }
    if order == ProfileOrder::Value {
        return Err(Error::Domain("weighted integral needs order α or 1+α".into()));
    }
    let q = p / (p - 1.0);
    let (k, tpow, _) = w.closed_form(alpha, order);
    let exponent = w.sigma - tpow * q;
    if exponent <= -1.0 {
        return Err(Error::Domain(format!(
            "integrand exponent σ - order·p/(p-1) = {exponent} must exceed -1"
        )));
    }
    let time_exponent = 1.0 - tpow * q;
    let closed_form = k.powf(q) * w.horizon.powf(time_exponent) / (exponent + 1.0);

    let (lo, hi) = w.domain();
    let integrand = |t: f64| {
        let wv = w_profile_eval(w, alpha, t, ProfileOrder::Value).unwrap_or(0.0);
        let dv = w_profile_eval(w, alpha, t, order).unwrap_or(0.0).abs();
        if wv <= 0.0 || dv == 0.0 {
            return 0.0;
        }
        (-wv.ln() / (p - 1.0) + q * dv.ln()).exp()
    };
    let tol = 1e-13 * closed_form.abs().max(1e-300);
    let (quadrature, _) = integrate_adaptive(integrand, lo, hi, tol)?;
    Ok(WeightedIntegral {
        closed_form,
        quadrature,
        discrepancy: (closed_form - quadrature).abs(),
        time_exponent,
    })
}

/// Log-log slope of the closed-form weighted integral across the horizons `horizons`.
pub fn weighted_integral_time_slope(
    kind: ProfileKind,
    sigma: f64,
    alpha: f64,
    p: f64,
    order: ProfileOrder,
    horizons: &[f64],
) -> Result<f64> {
    let mut xs = Vec::with_capacity(horizons.len());
    let mut ys = Vec::with_capacity(horizons.len());
    for &t in horizons {
        let w = WProfile::new(kind, sigma, t)?;
        let v = weighted_profile_integral(&w, alpha, p, order)?;
        xs.push(t.ln());
        ys.push(v.quadrature.ln());
    }
    Ok(fit_line(&xs, &ys)?.slope)
}
