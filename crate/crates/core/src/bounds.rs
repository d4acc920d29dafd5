//! Analytic bound functions attached to families as certification hooks.
//!
//! A [`BoundFn`] is a closed-form function of the truncation level `a` that
//! bounds an infimum over *all* indices of a family (not just the finite
//! evaluation window). Because the window infimum is always at least the full
//! infimum, a lower hook must sit below every window value, while an upper
//! hook only bounds the full infimum and may sit below window values.

use serde::{Deserialize, Serialize};

/// Closed-form bound expressions in the truncation level `a`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundFn {
    /// Identically zero.
    Zero,
    /// Constant `value`.
    Constant { value: f64 },
    /// `a ∧ (1 + ln a)`.
    MinLinearLog,
    /// `1 + ln a`.
    OnePlusLog,
    /// `weight · E(Y ∧ a)` for `Y` with density `y⁻²` on `[1, ∞)`:
    /// `weight·a` below 1, `weight·(1 + ln a)` above.
    ParetoWedge { weight: f64 },
    /// `slope · a`.
    Linear { slope: f64 },
    /// `factor · inner(a / factor)`.
    Rescaled { factor: f64, inner: Box<BoundFn> },
    /// `add + inner(a + shift)`.
    Offset {
        add: f64,
        shift: f64,
        inner: Box<BoundFn>,
    },
    /// Pointwise minimum of the terms.
    Min { terms: Vec<BoundFn> },
}

impl BoundFn {
    pub fn eval(&self, a: f64) -> f64 {
        match self {
            BoundFn::Zero => 0.0,
            BoundFn::Constant { value } => *value,
            BoundFn::MinLinearLog => a.min(1.0 + a.ln()),
            BoundFn::OnePlusLog => 1.0 + a.ln(),
            BoundFn::ParetoWedge { weight } => {
                if a <= 1.0 {
                    weight * a
                } else {
                    weight * (1.0 + a.ln())
                }
            }
            BoundFn::Linear { slope } => slope * a,
            BoundFn::Rescaled { factor, inner } => factor * inner.eval(a / factor),
            BoundFn::Offset { add, shift, inner } => add + inner.eval(a + shift),
            BoundFn::Min { terms } => terms
                .iter()
                .map(|t| t.eval(a))
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Limit as `a → ∞`; `+∞` when the bound diverges.
    pub fn limit(&self) -> f64 {
        match self {
            BoundFn::Zero => 0.0,
            BoundFn::Constant { value } => *value,
            BoundFn::MinLinearLog | BoundFn::OnePlusLog => f64::INFINITY,
            BoundFn::ParetoWedge { weight } => {
                if *weight > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            BoundFn::Linear { slope } => {
                if *slope > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            BoundFn::Rescaled { factor, inner } => {
                let l = inner.limit();
                if l.is_infinite() {
                    l
                } else {
                    factor * l
                }
            }
            BoundFn::Offset { add, inner, .. } => add + inner.limit(),
            BoundFn::Min { terms } => terms
                .iter()
                .map(BoundFn::limit)
                .fold(f64::INFINITY, f64::min),
        }
    }

    pub fn diverges(&self) -> bool {
        self.limit() == f64::INFINITY
    }

    pub fn describe(&self) -> String {
        match self {
            BoundFn::Zero => "0".into(),
            BoundFn::Constant { value } => format!("{value}"),
            BoundFn::MinLinearLog => "a ∧ (1 + ln a)".into(),
            BoundFn::OnePlusLog => "1 + ln a".into(),
            BoundFn::ParetoWedge { weight } => format!("{weight}·(a ∧ 1 + ln(a ∨ 1))"),
            BoundFn::Linear { slope } => format!("{slope}·a"),
            BoundFn::Rescaled { factor, inner } => {
                format!("{factor}·[{}](a/{factor})", inner.describe())
            }
            BoundFn::Offset { add, shift, inner } => {
                let shifted = format!("[{}](a + {shift})", inner.describe());
                if *add == 0.0 {
                    shifted
                } else {
                    format!("{add} + {shifted}")
                }
            }
            BoundFn::Min { terms } => {
                let parts: Vec<String> = terms.iter().map(BoundFn::describe).collect();
                format!("min({})", parts.join(", "))
            }
        }
    }
}
