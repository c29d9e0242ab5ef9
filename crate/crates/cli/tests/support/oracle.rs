//! Scalar reference for spatially constant data, `p = 2`.
//!
//! Integrating `y' = ∫_0^t (t-s)^{-γ} y(s)² ds` once gives the Volterra equation
//! `y(t) = y₀ + (1/α) ∫_0^t (t-σ)^α y(σ)² dσ`, `α = 1 - γ`, whose kernel is bounded.
//! It is discretized by implicit product trapezoid (exact moments of `(t-σ)^α` against
//! the hat functions) and each step solves a scalar quadratic.

/// Moments `(∫ k ℓ₀, ∫ k ℓ₁)` of `k(σ) = (t - σ)^α` against the two hat functions on
/// `[a, b]`, `b ≤ t`.
fn moments(t: f64, a: f64, b: f64, alpha: f64) -> (f64, f64) {
    let h = b - a;
    let far = t - a;
    let near = t - b;
    if h < 0.05 * near {
        // closed form cancels badly; the integrand is smooth here
        const X: [f64; 4] = [-0.861136311594053, -0.339981043584856, 0.339981043584856, 0.861136311594053];
        const W: [f64; 4] = [0.347854845137454, 0.652145154862546, 0.652145154862546, 0.347854845137454];
        let (mut lo, mut hi) = (0.0, 0.0);
        for (x, w) in X.iter().zip(W) {
            let s = a + 0.5 * h * (x + 1.0);
            let k = (t - s).powf(alpha) * 0.5 * h * w;
            lo += k * (b - s) / h;
            hi += k * (s - a) / h;
        }
        return (lo, hi);
    }
    let m0 = (far.powf(alpha + 1.0) - near.powf(alpha + 1.0)) / (alpha + 1.0);
    let m1 = (far.powf(alpha + 2.0) - near.powf(alpha + 2.0)) / (alpha + 2.0);
    ((m1 - near * m0) / h, (far * m0 - m1) / h)
}

pub struct Solution {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Time at which `y` first exceeded the cap, if it did.
    pub capped_at: Option<f64>,
}

/// Integrates to `t_end` with step `min(h0, eta·y^{-1/α₁})`, stopping once `y > cap`.
pub fn solve(y0: f64, gamma: f64, t_end: f64, h0: f64, eta: f64, cap: f64) -> Solution {
    let alpha = 1.0 - gamma;
    let rate = 1.0 / (2.0 - gamma);
    let mut times = vec![0.0];
    let mut values = vec![y0];
    loop {
        let t_prev = *times.last().unwrap();
        let y_prev = *values.last().unwrap();
        if y_prev > cap {
            return Solution { times, values, capped_at: Some(t_prev) };
        }
        if t_prev >= t_end - 1e-14 {
            return Solution { times, values, capped_at: None };
        }
        let mut h = h0.min(eta * y_prev.abs().max(1e-300).powf(-rate)).min(t_end - t_prev);
        loop {
            let t = t_prev + h;
            let n = times.len();
            let mut c = 0.0;
            for j in 0..n - 1 {
                let (lo, hi) = moments(t, times[j], times[j + 1], alpha);
                c += lo * values[j].powi(2) + hi * values[j + 1].powi(2);
            }
            let (lo, hi) = moments(t, t_prev, t, alpha);
            c = y0 + (c + lo * y_prev.powi(2)) / alpha;
            let a = hi / alpha;
            let disc = 1.0 - 4.0 * a * c;
            if disc < 0.0 {
                h *= 0.5;
                continue;
            }
            // smaller root of a y² - y + c = 0
            let y = 2.0 * c / (1.0 + disc.sqrt());
            times.push(t);
            values.push(y);
            break;
        }
    }
}

/// Value at `t_end` from Richardson extrapolation of fixed steps `h` and `h/2`.
pub fn value_at(y0: f64, gamma: f64, t_end: f64, h: f64) -> f64 {
    let coarse = *solve(y0, gamma, t_end, h, f64::INFINITY, f64::INFINITY).values.last().unwrap();
    let fine = *solve(y0, gamma, t_end, 0.5 * h, f64::INFINITY, f64::INFINITY).values.last().unwrap();
    (4.0 * fine - coarse) / 3.0
}

/// Time at which the solution passes `cap`.
pub fn blowup_time(y0: f64, gamma: f64, h0: f64, eta: f64, cap: f64) -> Option<f64> {
    solve(y0, gamma, f64::INFINITY, h0, eta, cap).capped_at
}
