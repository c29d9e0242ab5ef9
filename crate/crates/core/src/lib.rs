//! Numerical laboratory for the polyharmonic heat equation with a nonlinear memory term
//!
//! `u_t + (-Δ)^m u = ∫_0^t (t-s)^{-γ} |u(s)|^p ds` on a periodic box `[-L, L)^n`.

// `!(x > 0.0)` is used on purpose so NaN is rejected with the other invalid inputs.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod fractional;
pub mod grid;
pub mod liouville;
pub mod memory;
pub mod params;
pub mod quadrature;
pub mod solver;
pub mod special;
pub mod spectral;

pub use analysis::{BlowupReport, LowerBoundReport, RescaleDiagnostics};
pub use error::{Error, Result};
pub use grid::{Grid, GridFunction};
pub use params::{CriticalExponent, DerivedExponents, Params};
pub use liouville::{BumpSpec, CertificateReport, Regime, SpaceTimeField};
pub use memory::{MemoryLedger, TrimPolicy};
pub use solver::{SolverConfig, Status, Trajectory};
pub use spectral::{Semigroup, SymbolTable};
