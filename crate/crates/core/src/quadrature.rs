//! Quadrature building blocks shared by the fractional, memory and certificate code.

use crate::error::{Error, Result};

/// Weights `(w_lo, w_hi)` with
/// `∫_{s_lo}^{s_hi} (t - s)^κ f(s) ds ≈ w_lo f(s_lo) + w_hi f(s_hi)`,
/// exact for linear `f`.
///
/// `gap = t - s_hi ≥ 0`, `width = s_hi - s_lo > 0`, `kappa > -1`.
pub fn linear_product_weights(gap: f64, width: f64, kappa: f64) -> (f64, f64) {
    debug_assert!(gap >= 0.0 && width > 0.0 && kappa > -1.0);
    if kappa == 0.0 {
        return (0.5 * width, 0.5 * width);
    }
    if gap > 0.0 && width < 0.05 * gap {
        // smooth kernel over the cell: Gauss-Legendre avoids the cancellation of the moment form
        let (nodes, weights) = gauss_legendre_unit8();
        let mut lo = 0.0;
        let mut hi = 0.0;
        for (x, w) in nodes.iter().zip(weights.iter()) {
            let k = (gap + width * x).powf(kappa);
            lo += w * x * k;
            hi += w * (1.0 - x) * k;
        }
        return (width * lo, width * hi);
    }
    let beta = kappa + 1.0;
    let ua = gap + width;
    let m0 = (ua.powf(beta) - gap.powf(beta)) / beta;
    let m1 = (ua.powf(beta + 1.0) - gap.powf(beta + 1.0)) / (beta + 1.0);
    ((m1 - gap * m0) / width, (ua * m0 - m1) / width)
}

/// Cached 8-point Gauss-Legendre rule on `[0, 1]`.
fn gauss_legendre_unit8() -> &'static ([f64; 8], [f64; 8]) {
    use std::sync::OnceLock;
    static RULE: OnceLock<([f64; 8], [f64; 8])> = OnceLock::new();
    RULE.get_or_init(|| {
        let (x, w) = gauss_legendre(8);
        let mut nodes = [0.0; 8];
        let mut weights = [0.0; 8];
        for i in 0..8 {
            nodes[i] = 0.5 * (x[i] + 1.0);
            weights[i] = 0.5 * w[i];
        }
        (nodes, weights)
    })
}

/// Gauss-Legendre nodes and weights on `[-1, 1]` (Newton iteration on `P_n`), `n >= 2`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 2);
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

const GK_NODES: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_KRONROD_W: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_728_0,
];
const GK_GAUSS_W: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = GK_KRONROD_W[7] * fc;
    let mut gauss = GK_GAUSS_W[3] * fc;
    for i in 0..7 {
        let dx = h * GK_NODES[i];
        let s = f(c - dx) + f(c + dx);
        kron += GK_KRONROD_W[i] * s;
        if i % 2 == 1 {
            gauss += GK_GAUSS_W[i / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod (7/15) quadrature of `f` on `[a, b]`.
///
/// Endpoints are never evaluated, so integrable endpoint singularities are tolerated.
pub fn integrate_adaptive(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> Result<(f64, f64)> {
    let mut stack = vec![(a, b, 0usize)];
    let mut total = 0.0;
    let mut err = 0.0;
    let mut evals = 0usize;
    while let Some((lo, hi, depth)) = stack.pop() {
        let (v, e) = gk15(&f, lo, hi);
        evals += 1;
        let local_tol = tol * (hi - lo) / (b - a);
        if e <= local_tol.max(1e-15 * v.abs()) || depth >= 60 {
            total += v;
            err += e;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, depth + 1));
            stack.push((mid, hi, depth + 1));
        }
        if evals > 200_000 {
            return Err(Error::Domain("adaptive quadrature exceeded evaluation budget".into()));
        }
    }
    if !total.is_finite() {
        return Err(Error::Domain("adaptive quadrature produced a non-finite value".into()));
    }
    Ok((total, err))
}

/// Composite trapezoid weights for `n + 1` uniform nodes with spacing `h`.
pub fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n + 1];
    w[0] = 0.5 * h;
    w[n] = 0.5 * h;
    w
}

/// Ordinary least-squares line `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual.
    pub residual: f64,
}

pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::WindowTooShort {
            got: xs.len().min(ys.len()),
            need: 2,
        });
    }
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Domain("degenerate abscissae in line fit".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        residual: (ss / n).sqrt(),
    })
}
