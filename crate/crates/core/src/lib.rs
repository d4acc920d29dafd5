//! Nonintegrability diagnostics for sequences of random variables.
//!
//! The crate evaluates the criterion functionals behind uniform
//! nonintegrability (UNI), its weak form (W-UNI), and the tail-sum form
//! (W\*-UNI) over grids of truncation levels and finite index windows, and
//! builds a Vallée-Poussin function `φ` for which `{φ(|X_m|)}` keeps the
//! W-UNI property.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`models`] | laws of `|X|` and indexed families |
//! | [`truncation`] | wedge / restricted means, tail sums, left partial moments |
//! | [`diagnostics`] | infimum curves, verdicts, the α–M criterion |
//! | [`vallee_poussin`] | breakpoints, `g`, `h = x·g(x)`, `φ = h⁻¹` |
//! | [`experiments`] | reproductions of the worked examples |
//!
//! Infima over infinitely many indices are approximated on a finite window;
//! a verdict is only *certified* through an analytic bound hook
//! ([`bounds::BoundFn`]) attached to the family.

pub mod bounds;
pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod models;
pub mod quadrature;
pub mod report;
pub mod truncation;
pub mod vallee_poussin;

use serde::{Deserialize, Serialize};

pub use bounds::BoundFn;
pub use error::{Error, Result};
pub use grid::{GridSpec, Spacing};
pub use models::{AlphaSequence, FamilyKind, IndexWindow, Interpolation, RvFamily, RvSpec};
pub use truncation::{EstimateWithError, TruncationMethod};

/// Numerical tolerances shared by the evaluators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub quad_abs: f64,
    pub quad_rel: f64,
    /// Relative bracket width at which `φ` inversion stops.
    pub invert_rel: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad_abs: 1e-12,
            quad_rel: 1e-10,
            invert_rel: 1e-12,
        }
    }
}

impl Tolerances {
    pub fn quadrature(&self) -> TruncationMethod {
        TruncationMethod::Quadrature {
            abs_tol: self.quad_abs,
            rel_tol: self.quad_rel,
        }
    }
}
