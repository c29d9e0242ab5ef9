//! Equation parameters `(n, m, gamma, p)` and the exponents derived from them.

use crate::error::{invalid, Result};
use crate::special::gamma;

/// Validated parameters of `u_t + (-Δ)^m u = ∫_0^t (t-s)^{-γ} |u|^p ds` in `n` space dimensions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    n: usize,
    m: usize,
    gamma: f64,
    p: f64,
}

impl Params {
    pub fn new(n: usize, m: usize, gamma: f64, p: f64) -> Result<Self> {
        if n < 1 {
            return Err(invalid("n", "spatial dimension must be at least 1"));
        }
        if m < 1 {
            return Err(invalid("m", "polyharmonic order must be at least 1"));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(invalid("gamma", format!("gamma must lie in (0,1), got {gamma}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(invalid("p", format!("p must be a finite number > 1, got {p}")));
        }
        Ok(Self { n, m, gamma, p })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Fractional order `α = 1 - γ` of the memory integral.
    pub fn alpha(&self) -> f64 {
        1.0 - self.gamma
    }

    /// `C_α = Γ(α)`, so that the memory term equals `C_α I^α(|u|^p)`.
    pub fn c_alpha(&self) -> f64 {
        gamma(self.alpha())
    }

    /// Hölder conjugate `p/(p-1)`.
    pub fn conjugate(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn derived(&self) -> DerivedExponents {
        DerivedExponents::of(self)
    }
}

/// Both branches of the critical exponent together with their maximum.
///
/// The fujita-type branch is `+∞` whenever `(n - 2m + 2mγ)₊ = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CriticalExponent {
    pub memory_branch: f64,
    pub fujita_branch: f64,
    pub value: f64,
}

impl CriticalExponent {
    pub fn new(n: usize, m: usize, gamma: f64) -> Self {
        let memory_branch = 1.0 / gamma;
        let denom = n as f64 - 2.0 * m as f64 + 2.0 * m as f64 * gamma;
        let fujita_branch = if denom > 0.0 {
            1.0 + 2.0 * m as f64 * (2.0 - gamma) / denom
        } else {
            f64::INFINITY
        };
        Self {
            memory_branch,
            fujita_branch,
            value: memory_branch.max(fujita_branch),
        }
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivedExponents {
    /// Blow-up rate exponent `(2-γ)/(p-1)`.
    pub alpha1: f64,
    pub p_star: CriticalExponent,
    /// Decay exponent of the test-function certificate, `-1 + (1+α)p/(p-1) - n/(2m)`.
    pub delta: f64,
}

impl DerivedExponents {
    pub fn of(params: &Params) -> Self {
        let g = params.gamma;
        let p = params.p;
        let alpha = params.alpha();
        Self {
            alpha1: (2.0 - g) / (p - 1.0),
            p_star: CriticalExponent::new(params.n, params.m, g),
            delta: -1.0 + (1.0 + alpha) * p / (p - 1.0) - params.n as f64 / (2.0 * params.m as f64),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    #[test]
    fn accepts_valid_quadruples() {
        let a = Params::new(1, 1, 0.5, 2.0).unwrap();
        assert_eq!(a.alpha(), 0.5);
        let b = Params::new(3, 2, 0.25, 1.5).unwrap();
        assert_eq!(b.alpha(), 0.75);
    }

    #[test]
    fn rejects_each_field_independently() {
        let field = |r: Result<Params>| match r {
            Err(Error::InvalidParam { field, .. }) => field,
            other => panic!("expected rejection, got {other:?}"),
        };
        assert_eq!(field(Params::new(0, 1, 0.5, 2.0)), "n");
        assert_eq!(field(Params::new(1, 0, 0.5, 2.0)), "m");
        assert_eq!(field(Params::new(1, 1, 1.0, 2.0)), "gamma");
        assert_eq!(field(Params::new(1, 1, 0.0, 2.0)), "gamma");
        assert_eq!(field(Params::new(1, 1, 0.5, 1.0)), "p");
        assert_eq!(field(Params::new(1, 1, f64::NAN, 2.0)), "gamma");
        let msg = Params::new(1, 1, 1.0, 2.0).unwrap_err().to_string();
        assert!(msg.contains("gamma must lie in (0,1)"), "{msg}");
    }

    #[test]
    fn critical_exponent_branches() {
        let c = CriticalExponent::new(3, 1, 0.5);
        assert!((c.memory_branch - 2.0).abs() < 1e-15);
        assert!((c.fujita_branch - 2.5).abs() < 1e-15);
        assert!((c.value - 2.5).abs() < 1e-15);

        let d = CriticalExponent::new(1, 1, 0.5);
        assert!(d.fujita_branch.is_infinite());
        assert!(d.is_infinite());

        // gamma -> 1 recovers the Fujita exponent 1 + 2/n
        let e = CriticalExponent::new(3, 1, 1.0 - 1e-6);
        assert!((e.fujita_branch - (1.0 + 2.0 / 3.0)).abs() < 1e-4);
    }

    #[test]
    fn derived_exponent_invariants() {
        for n in 1..=4 {
            for m in 1..=3 {
                for &g in &[0.1, 0.3, 0.5, 0.7, 0.9] {
                    for &p in &[1.1, 1.5, 2.0, 3.0, 5.0, 9.0] {
                        let d = Params::new(n, m, g, p).unwrap().derived();
                        assert!(d.alpha1 > 0.0);
                        assert!(d.p_star.value >= 1.0 / g);
                        let fb = d.p_star.fujita_branch;
                        if fb.is_finite() && (p - fb).abs() > 1e-9 {
                            assert_eq!(d.delta > 0.0, p < fb, "n={n} m={m} g={g} p={p}");
                        } else if fb.is_infinite() {
                            assert!(d.delta > 0.0);
                        }
                    }
                }
            }
        }
    }
}
