//! Laws of `|X|` and indexed families of them.
//!
//! Every law is described only through `|X|`: the survival function
//! `S(x) = P(|X| > x)`, its generalized inverse, and inverse-transform
//! sampling. The families reproduce the two heavy-tailed constructions
//! `X_n = nY` and the Pareto-α sequence, plus a Bernoulli-thinned Pareto
//! family whose members are all nonintegrable without being uniformly so.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundFn;
use crate::error::ModelError;

/// Law of a single nonnegative random variable `|X|`.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RvSpec {
    /// `nY` with `Y` of density `y⁻²` on `[1, ∞)`.
    ScaledPareto {
        scale: u64,
    },
    /// Density `(1 − α)·x^(α − 2)` on `[1, ∞)`.
    ParetoAlpha {
        alpha: f64,
    },
    /// `B·Y` with `B ~ Bernoulli(p)` independent of `Y`.
    BernoulliPareto {
        p: f64,
    },
    /// Point mass at `value`.
    Degenerate {
        value: f64,
    },
    Empirical(EmpiricalLaw),
    Tabulated(TabulatedSurvival),
    /// `factor·|X|` for the base law.
    Scaled {
        base: Box<RvSpec>,
        factor: f64,
    },
}

fn check_unit_open(name: &'static str, v: f64) -> Result<(), ModelError> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(ModelError::InvalidParameter {
            name,
            value: v,
            reason: "must lie in (0, 1)",
        })
    }
}

impl RvSpec {
    pub fn scaled_pareto(scale: u64) -> Result<Self, ModelError> {
        if scale == 0 {
            return Err(ModelError::InvalidParameter {
                name: "scale",
                value: 0.0,
                reason: "must be a positive integer",
            });
        }
        Ok(RvSpec::ScaledPareto { scale })
    }

    pub fn pareto_alpha(alpha: f64) -> Result<Self, ModelError> {
        check_unit_open("alpha", alpha)?;
        Ok(RvSpec::ParetoAlpha { alpha })
    }

    pub fn bernoulli_pareto(p: f64) -> Result<Self, ModelError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "p",
                value: p,
                reason: "must lie in (0, 1]",
            });
        }
        Ok(RvSpec::BernoulliPareto { p })
    }

    pub fn degenerate(value: f64) -> Result<Self, ModelError> {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "value",
                value,
                reason: "must be finite and nonnegative",
            });
        }
        Ok(RvSpec::Degenerate { value })
    }

    pub fn empirical(samples: Vec<f64>) -> Result<Self, ModelError> {
        Ok(RvSpec::Empirical(EmpiricalLaw::new(samples)?))
    }

    pub fn tabulated(
        points: Vec<(f64, f64)>,
        interpolation: Interpolation,
    ) -> Result<Self, ModelError> {
        Ok(RvSpec::Tabulated(TabulatedSurvival::new(
            points,
            interpolation,
        )?))
    }

    pub fn scaled(base: RvSpec, factor: f64) -> Result<Self, ModelError> {
        if !(factor > 0.0 && factor.is_finite()) {
            return Err(ModelError::InvalidParameter {
                name: "factor",
                value: factor,
                reason: "must be finite and positive",
            });
        }
        Ok(RvSpec::Scaled {
            base: Box::new(base),
            factor,
        })
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            RvSpec::ScaledPareto { .. } => "scaled_pareto",
            RvSpec::ParetoAlpha { .. } => "pareto_alpha",
            RvSpec::BernoulliPareto { .. } => "bernoulli_pareto",
            RvSpec::Degenerate { .. } => "degenerate",
            RvSpec::Empirical(_) => "empirical",
            RvSpec::Tabulated(_) => "tabulated",
            RvSpec::Scaled { .. } => "scaled",
        }
    }

    /// `S(x) = P(|X| > x)` for `x ≥ 0`.
    pub fn survival(&self, x: f64) -> f64 {
        match self {
            RvSpec::ScaledPareto { scale } => {
                let n = *scale as f64;
                if x < n {
                    1.0
                } else {
                    n / x
                }
            }
            RvSpec::ParetoAlpha { alpha } => {
                if x < 1.0 {
                    1.0
                } else {
                    x.powf(alpha - 1.0)
                }
            }
            RvSpec::BernoulliPareto { p } => {
                if x < 1.0 {
                    *p
                } else {
                    p / x
                }
            }
            RvSpec::Degenerate { value } => {
                if x < *value {
                    1.0
                } else {
                    0.0
                }
            }
            RvSpec::Empirical(e) => e.survival(x),
            RvSpec::Tabulated(t) => t.survival(x),
            RvSpec::Scaled { base, factor } => base.survival(x / factor),
        }
    }

    /// Generalized inverse `Q(u) = inf{x : P(|X| ≤ x) ≥ u}` for `u ∈ [0, 1)`.
    ///
    /// At `u = 0` the left end of the support is returned (the limit
    /// `Q(0+)`), which keeps inverse-transform samples inside the support.
    /// Tabulated laws whose survival floor exceeds `1 − u` return `+∞`.
    pub fn quantile(&self, u: f64) -> Result<f64, ModelError> {
        if !(0.0..1.0).contains(&u) {
            return Err(ModelError::InvalidParameter {
                name: "u",
                value: u,
                reason: "must lie in [0, 1)",
            });
        }
        Ok(self.quantile_unchecked(u))
    }

    pub(crate) fn quantile_unchecked(&self, u: f64) -> f64 {
        match self {
            RvSpec::ScaledPareto { scale } => *scale as f64 / (1.0 - u),
            RvSpec::ParetoAlpha { alpha } => (1.0 - u).powf(-1.0 / (1.0 - alpha)),
            RvSpec::BernoulliPareto { p } => {
                if *p < 1.0 && u <= 1.0 - p {
                    0.0
                } else {
                    p / (1.0 - u)
                }
            }
            RvSpec::Degenerate { value } => *value,
            RvSpec::Empirical(e) => e.quantile(u),
            RvSpec::Tabulated(t) => t.quantile(u),
            RvSpec::Scaled { base, factor } => factor * base.quantile_unchecked(u),
        }
    }

    /// Points where `S` has a kink or jump; quadrature splits there.
    pub fn survival_breaks(&self) -> Vec<f64> {
        match self {
            RvSpec::ScaledPareto { scale } => vec![*scale as f64],
            RvSpec::ParetoAlpha { .. } | RvSpec::BernoulliPareto { .. } => vec![1.0],
            RvSpec::Degenerate { value } => vec![*value],
            RvSpec::Empirical(e) => e.distinct_values(),
            RvSpec::Tabulated(t) => t.points.iter().map(|p| p.0).collect(),
            RvSpec::Scaled { base, factor } => base
                .survival_breaks()
                .into_iter()
                .map(|b| b * factor)
                .collect(),
        }
    }

    /// Points in `(0, 1)` where `Q` has a kink or jump.
    pub fn quantile_breaks(&self) -> Vec<f64> {
        match self {
            RvSpec::ScaledPareto { .. }
            | RvSpec::ParetoAlpha { .. }
            | RvSpec::Degenerate { .. } => Vec::new(),
            RvSpec::BernoulliPareto { p } => {
                if *p < 1.0 {
                    vec![1.0 - p]
                } else {
                    Vec::new()
                }
            }
            RvSpec::Empirical(e) => e.cumulative_fractions(),
            RvSpec::Tabulated(t) => t
                .points
                .iter()
                .map(|p| 1.0 - p.1)
                .filter(|u| *u > 0.0 && *u < 1.0)
                .collect(),
            RvSpec::Scaled { base, .. } => base.quantile_breaks(),
        }
    }

    /// True when `S` has no jumps, so `S(Q(u)) = 1 − u`.
    pub fn is_continuous(&self) -> bool {
        match self {
            RvSpec::ScaledPareto { .. } | RvSpec::ParetoAlpha { .. } => true,
            RvSpec::BernoulliPareto { p } => *p >= 1.0,
            RvSpec::Degenerate { .. } | RvSpec::Empirical(_) => false,
            RvSpec::Tabulated(t) => {
                t.interpolation == Interpolation::Linear
                    && t.points.first().is_some_and(|p| p.1 >= 1.0)
            }
            RvSpec::Scaled { base, .. } => base.is_continuous(),
        }
    }

    /// Draws one value of `|X|`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            RvSpec::BernoulliPareto { p } => {
                let hit = rng.random::<f64>() < *p;
                let u: f64 = rng.random();
                if hit {
                    1.0 / (1.0 - u)
                } else {
                    0.0
                }
            }
            RvSpec::Scaled { base, factor } => factor * base.draw(rng),
            other => other.quantile_unchecked(rng.random::<f64>()),
        }
    }

    /// `count` deterministic draws from a generator seeded with `seed`.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.draw(&mut rng)).collect()
    }

    /// Analytic lower/upper bounds on `E(|X| ∧ a)` as functions of `a`.
    pub fn wedge_bounds(&self) -> (Option<BoundFn>, Option<BoundFn>) {
        match self {
            RvSpec::ScaledPareto { scale } => (
                Some(BoundFn::Rescaled {
                    factor: *scale as f64,
                    inner: Box::new(BoundFn::ParetoWedge { weight: 1.0 }),
                }),
                None,
            ),
            RvSpec::ParetoAlpha { .. } => (Some(BoundFn::OnePlusLog), None),
            RvSpec::BernoulliPareto { p } => (Some(BoundFn::ParetoWedge { weight: *p }), None),
            RvSpec::Degenerate { value } => (None, Some(BoundFn::Constant { value: *value })),
            RvSpec::Empirical(e) => (None, Some(BoundFn::Constant { value: e.max() })),
            RvSpec::Tabulated(t) => {
                let floor = t.floor();
                if floor > 0.0 {
                    (Some(BoundFn::Linear { slope: floor }), None)
                } else {
                    let top = t
                        .points
                        .iter()
                        .find(|p| p.1 <= 0.0)
                        .map(|p| p.0)
                        .unwrap_or(0.0);
                    (None, Some(BoundFn::Constant { value: top }))
                }
            }
            RvSpec::Scaled { base, factor } => {
                let wrap = |b: BoundFn| BoundFn::Rescaled {
                    factor: *factor,
                    inner: Box::new(b),
                };
                let (lo, hi) = base.wedge_bounds();
                (lo.map(wrap), hi.map(wrap))
            }
        }
    }
}

/// Empirical law of a finite multiset of nonnegative reals.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmpiricalLaw {
    sorted: Vec<f64>,
}

impl EmpiricalLaw {
    pub fn new(mut samples: Vec<f64>) -> Result<Self, ModelError> {
        if samples.is_empty() {
            return Err(ModelError::EmptySamples);
        }
        if let Some(&bad) = samples.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
            return Err(ModelError::InvalidParameter {
                name: "sample",
                value: bad,
                reason: "samples must be finite and nonnegative",
            });
        }
        samples.sort_by(f64::total_cmp);
        Ok(Self { sorted: samples })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().expect("nonempty by construction")
    }

    fn survival(&self, x: f64) -> f64 {
        let at_or_below = self.sorted.partition_point(|v| *v <= x);
        (self.sorted.len() - at_or_below) as f64 / self.sorted.len() as f64
    }

    fn quantile(&self, u: f64) -> f64 {
        let n = self.sorted.len();
        let k = (u * n as f64).ceil() as usize;
        self.sorted[k.clamp(1, n) - 1]
    }

    fn distinct_values(&self) -> Vec<f64> {
        let mut v = self.sorted.clone();
        v.dedup();
        v
    }

    fn cumulative_fractions(&self) -> Vec<f64> {
        let n = self.sorted.len();
        (1..n)
            .filter(|&i| self.sorted[i] != self.sorted[i - 1])
            .map(|i| i as f64 / n as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Interpolation {
    /// Right-continuous step function.
    #[default]
    Step,
    Linear,
}

/// Survival function given by a table of `(x, S(x))` pairs.
///
/// `S = 1` left of the first abscissa and `S` stays at the last tabulated
/// value (the floor) beyond the last one.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TabulatedSurvival {
    points: Vec<(f64, f64)>,
    interpolation: Interpolation,
}

impl TabulatedSurvival {
    pub fn new(points: Vec<(f64, f64)>, interpolation: Interpolation) -> Result<Self, ModelError> {
        if points.is_empty() {
            return Err(ModelError::BadTable("table is empty".into()));
        }
        for (i, &(x, s)) in points.iter().enumerate() {
            if !(x.is_finite() && x >= 0.0) {
                return Err(ModelError::BadTable(format!(
                    "row {i}: x = {x} must be finite and nonnegative"
                )));
            }
            if !(0.0..=1.0).contains(&s) {
                return Err(ModelError::BadTable(format!(
                    "row {i}: S = {s} outside [0, 1]"
                )));
            }
            if i > 0 {
                let (px, ps) = points[i - 1];
                if x <= px {
                    return Err(ModelError::BadTable(format!(
                        "row {i}: x must be strictly increasing"
                    )));
                }
                if s > ps {
                    return Err(ModelError::BadTable(format!(
                        "row {i}: S must be nonincreasing"
                    )));
                }
            }
        }
        Ok(Self {
            points,
            interpolation,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    pub fn floor(&self) -> f64 {
        self.points.last().map(|p| p.1).unwrap_or(0.0)
    }

    fn survival(&self, x: f64) -> f64 {
        let i = self.points.partition_point(|p| p.0 <= x);
        if i == 0 {
            return 1.0;
        }
        let (x0, s0) = self.points[i - 1];
        match (self.interpolation, self.points.get(i)) {
            (Interpolation::Linear, Some(&(x1, s1))) => s0 + (s1 - s0) * (x - x0) / (x1 - x0),
            _ => s0,
        }
    }

    fn quantile(&self, u: f64) -> f64 {
        let t = 1.0 - u;
        let Some(i) = self.points.iter().position(|p| p.1 <= t) else {
            return f64::INFINITY;
        };
        if i == 0 || self.interpolation == Interpolation::Step {
            return self.points[i].0;
        }
        let (x0, s0) = self.points[i - 1];
        let (x1, s1) = self.points[i];
        x0 + (s0 - t) / (s0 - s1) * (x1 - x0)
    }
}

/// Rule generating the exponents `α_n` of the Pareto-α family.
#[derive(Debug, Clone, PartialEq, Serialize, Default)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AlphaSequence {
    /// `α_{2k−1} = 1 − 1/(k+1)`, `α_{2k} = 1/(k+1)`.
    #[default]
    Interleaved,
    /// `α_n = values[n − 1]`.
    Explicit { values: Vec<f64> },
}

impl AlphaSequence {
    pub fn explicit(values: Vec<f64>) -> Result<Self, ModelError> {
        for &v in &values {
            check_unit_open("alpha", v)?;
        }
        if values.is_empty() {
            return Err(ModelError::InvalidParameter {
                name: "alphas",
                value: 0.0,
                reason: "need at least one exponent",
            });
        }
        Ok(AlphaSequence::Explicit { values })
    }

    pub fn alpha(&self, n: u64) -> f64 {
        match self {
            AlphaSequence::Interleaved => {
                let k = n.div_ceil(2) as f64;
                if n % 2 == 1 {
                    1.0 - 1.0 / (k + 1.0)
                } else {
                    1.0 / (k + 1.0)
                }
            }
            AlphaSequence::Explicit { values } => values[(n - 1) as usize],
        }
    }

    fn len(&self) -> Option<u64> {
        match self {
            AlphaSequence::Interleaved => None,
            AlphaSequence::Explicit { values } => Some(values.len() as u64),
        }
    }
}

/// Finite range of indices `min..=max` over which infima are evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexWindow {
    pub min: u64,
    pub max: u64,
}

impl IndexWindow {
    pub fn new(min: u64, max: u64) -> Result<Self, ModelError> {
        if min == 0 {
            return Err(ModelError::BadWindow {
                min,
                max,
                reason: "indices start at 1",
            });
        }
        if max < min {
            return Err(ModelError::BadWindow {
                min,
                max,
                reason: "max must be at least min",
            });
        }
        Ok(Self { min, max })
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + Clone {
        self.min..=self.max
    }

    pub fn len(&self) -> usize {
        (self.max - self.min + 1) as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// Index-to-law rule of a family.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FamilyKind {
    /// `X_n = nY`.
    ScaledPareto,
    /// Pareto-α laws with exponents from the sequence.
    ParetoAlpha { alphas: AlphaSequence },
    /// `|X_n| = B_n·Y` with `P(B_n = 1) = 1/n`.
    HarmonicMixture,
    /// Every member has the same law.
    Constant { spec: RvSpec },
    /// Finite list; member `n` is `specs[n − 1]`.
    Listed { specs: Vec<RvSpec> },
    /// Members of `base` multiplied by `factor`.
    Rescaled { base: Box<FamilyKind>, factor: f64 },
}

impl FamilyKind {
    pub fn member(&self, n: u64) -> RvSpec {
        match self {
            FamilyKind::ScaledPareto => RvSpec::ScaledPareto { scale: n },
            FamilyKind::ParetoAlpha { alphas } => RvSpec::ParetoAlpha {
                alpha: alphas.alpha(n),
            },
            FamilyKind::HarmonicMixture => RvSpec::BernoulliPareto { p: 1.0 / n as f64 },
            FamilyKind::Constant { spec } => spec.clone(),
            FamilyKind::Listed { specs } => specs[(n - 1) as usize].clone(),
            FamilyKind::Rescaled { base, factor } => RvSpec::Scaled {
                base: Box::new(base.member(n)),
                factor: *factor,
            },
        }
    }

    /// Largest valid index, when the family is finite.
    pub fn max_index(&self) -> Option<u64> {
        match self {
            FamilyKind::ParetoAlpha { alphas } => alphas.len(),
            FamilyKind::Listed { specs } => Some(specs.len() as u64),
            FamilyKind::Rescaled { base, .. } => base.max_index(),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            FamilyKind::ScaledPareto => "scaled_pareto".into(),
            FamilyKind::ParetoAlpha { alphas } => match alphas {
                AlphaSequence::Interleaved => "pareto_alpha(interleaved)".into(),
                AlphaSequence::Explicit { values } => {
                    format!("pareto_alpha(explicit, {})", values.len())
                }
            },
            FamilyKind::HarmonicMixture => "bernoulli_pareto(p_n = 1/n)".into(),
            FamilyKind::Constant { spec } => format!("constant({})", spec.variant_name()),
            FamilyKind::Listed { specs } => format!("listed({})", specs.len()),
            FamilyKind::Rescaled { base, factor } => format!("{factor}·{}", base.describe()),
        }
    }

    fn default_hooks(&self) -> FamilyHooks {
        match self {
            FamilyKind::ScaledPareto => FamilyHooks {
                wedge_lower: Some(BoundFn::MinLinearLog),
                restricted_upper: Some(BoundFn::Zero),
                beta_upper: Some(BoundFn::Zero),
                ..FamilyHooks::default()
            },
            FamilyKind::ParetoAlpha { alphas } => {
                let mut hooks = FamilyHooks {
                    wedge_lower: Some(BoundFn::OnePlusLog),
                    ..FamilyHooks::default()
                };
                // sup α_n = 1 drives both the restricted mean and P(|X_n| ≤ a) to 0
                if *alphas == AlphaSequence::Interleaved {
                    hooks.restricted_upper = Some(BoundFn::Zero);
                    hooks.beta_upper = Some(BoundFn::Zero);
                }
                hooks
            }
            FamilyKind::HarmonicMixture => FamilyHooks {
                wedge_upper: Some(BoundFn::Zero),
                restricted_upper: Some(BoundFn::Zero),
                ..FamilyHooks::default()
            },
            FamilyKind::Constant { spec } => {
                let (lo, hi) = spec.wedge_bounds();
                // E(|X| : |X| ≤ a) ≤ E(|X| ∧ a)
                FamilyHooks {
                    wedge_lower: lo,
                    restricted_upper: hi.clone(),
                    wedge_upper: hi,
                    ..FamilyHooks::default()
                }
            }
            FamilyKind::Listed { specs } => {
                let bounds: Vec<_> = specs.iter().map(RvSpec::wedge_bounds).collect();
                let lowers: Option<Vec<BoundFn>> = bounds.iter().map(|b| b.0.clone()).collect();
                let uppers: Vec<BoundFn> = bounds.iter().filter_map(|b| b.1.clone()).collect();
                let upper = (!uppers.is_empty()).then_some(BoundFn::Min { terms: uppers });
                FamilyHooks {
                    wedge_lower: lowers.map(|terms| BoundFn::Min { terms }),
                    restricted_upper: upper.clone(),
                    wedge_upper: upper,
                    ..FamilyHooks::default()
                }
            }
            FamilyKind::Rescaled { base, factor } => {
                let base_hooks = base.default_hooks();
                let wrap = |b: Option<BoundFn>| {
                    b.map(|b| BoundFn::Rescaled {
                        factor: *factor,
                        inner: Box::new(b),
                    })
                };
                FamilyHooks {
                    wedge_lower: wrap(base_hooks.wedge_lower),
                    wedge_upper: wrap(base_hooks.wedge_upper),
                    restricted_lower: wrap(base_hooks.restricted_lower),
                    restricted_upper: wrap(base_hooks.restricted_upper),
                    beta_upper: base_hooks.beta_upper,
                }
            }
        }
    }
}

/// Analytic bounds on the infima over all indices, used to certify verdicts.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct FamilyHooks {
    pub wedge_lower: Option<BoundFn>,
    pub wedge_upper: Option<BoundFn>,
    pub restricted_lower: Option<BoundFn>,
    pub restricted_upper: Option<BoundFn>,
    /// Upper bound on `inf_n P(|X_n| ≤ a)`.
    pub beta_upper: Option<BoundFn>,
}

/// An indexed family `{X_n}` evaluated over a finite window.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RvFamily {
    kind: FamilyKind,
    window: IndexWindow,
    hooks: FamilyHooks,
}

impl RvFamily {
    /// Builds a family with the default analytic hooks for its kind.
    pub fn new(kind: FamilyKind, window: IndexWindow) -> Result<Self, ModelError> {
        if let Some(max) = kind.max_index() {
            if window.max > max {
                return Err(ModelError::BadWindow {
                    min: window.min,
                    max: window.max,
                    reason: "window exceeds the number of family members",
                });
            }
        }
        if let FamilyKind::Rescaled { factor, .. } = &kind {
            if !(*factor > 0.0 && factor.is_finite()) {
                return Err(ModelError::InvalidParameter {
                    name: "factor",
                    value: *factor,
                    reason: "must be finite and positive",
                });
            }
        }
        let hooks = kind.default_hooks();
        Ok(Self {
            kind,
            window,
            hooks,
        })
    }

    /// One-member family wrapping a single law.
    pub fn single(spec: RvSpec) -> Self {
        Self::new(
            FamilyKind::Constant { spec },
            IndexWindow { min: 1, max: 1 },
        )
        .expect("single-member window is always valid")
    }

    pub fn with_hooks(mut self, hooks: FamilyHooks) -> Self {
        self.hooks = hooks;
        self
    }

    pub fn with_window(mut self, window: IndexWindow) -> Result<Self, ModelError> {
        if let Some(max) = self.kind.max_index() {
            if window.max > max {
                return Err(ModelError::BadWindow {
                    min: window.min,
                    max: window.max,
                    reason: "window exceeds the number of family members",
                });
            }
        }
        self.window = window;
        Ok(self)
    }

    pub fn kind(&self) -> &FamilyKind {
        &self.kind
    }

    pub fn window(&self) -> IndexWindow {
        self.window
    }

    pub fn hooks(&self) -> &FamilyHooks {
        &self.hooks
    }

    pub fn member(&self, n: u64) -> RvSpec {
        self.kind.member(n)
    }

    pub fn members(&self) -> impl Iterator<Item = (u64, RvSpec)> + '_ {
        self.window.iter().map(|n| (n, self.kind.member(n)))
    }

    /// Index in the window whose survival function is pointwise smallest,
    /// when the family's structure guarantees one exists.
    ///
    /// Infima over the window of any survival-monotone functional (block
    /// sums, tail sums) are attained at this index.
    pub fn survival_argmin(&self) -> Option<u64> {
        fn pick(kind: &FamilyKind, w: IndexWindow) -> Option<u64> {
            match kind {
                // S_n(x) = min(1, n/x) grows with n
                FamilyKind::ScaledPareto | FamilyKind::Constant { .. } => Some(w.min),
                // S_n(x) = p_n·min(1, 1/x) shrinks with n
                FamilyKind::HarmonicMixture => Some(w.max),
                // S(x) = x^(α−1) on x ≥ 1 grows with α
                FamilyKind::ParetoAlpha { alphas } => w
                    .iter()
                    .min_by(|&i, &j| alphas.alpha(i).total_cmp(&alphas.alpha(j)).then(i.cmp(&j))),
                FamilyKind::Listed { .. } => None,
                FamilyKind::Rescaled { base, .. } => pick(base, w),
            }
        }
        pick(&self.kind, self.window)
    }

    pub fn describe(&self) -> String {
        self.kind.describe()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn survival_examples() {
        let sp2 = RvSpec::scaled_pareto(2).unwrap();
        assert_eq!(sp2.survival(1.0), 1.0);
        assert_eq!(sp2.survival(8.0), 0.25);
        let pa = RvSpec::pareto_alpha(0.5).unwrap();
        assert!((pa.survival(4.0) - 0.5).abs() < 1e-15);
        let mix = RvSpec::bernoulli_pareto(0.3).unwrap();
        assert_eq!(mix.survival(0.5), 0.3);
        assert!((mix.survival(3.0) - 0.1).abs() < 1e-15);
        let d = RvSpec::degenerate(7.0).unwrap();
        assert_eq!(d.survival(6.99), 1.0);
        assert_eq!(d.survival(7.0), 0.0);
    }

    #[test]
    fn quantile_examples() {
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        assert_eq!(sp1.quantile(0.5).unwrap(), 2.0);
        assert_eq!(RvSpec::degenerate(7.0).unwrap().quantile(0.3).unwrap(), 7.0);
        let pa = RvSpec::pareto_alpha(0.5).unwrap();
        assert!((pa.quantile(0.5).unwrap() - 4.0).abs() < 1e-12);
        assert!(sp1.quantile(1.0).is_err());
        assert!(sp1.quantile(-0.1).is_err());
    }

    #[test]
    fn mixture_quantile_has_atom_at_zero() {
        let mix = RvSpec::bernoulli_pareto(0.25).unwrap();
        assert_eq!(mix.quantile(0.5).unwrap(), 0.0);
        assert_eq!(mix.quantile(0.75).unwrap(), 0.0);
        assert!((mix.quantile(0.875).unwrap() - 2.0).abs() < 1e-12);
        let full = RvSpec::bernoulli_pareto(1.0).unwrap();
        assert_eq!(full.quantile(0.0).unwrap(), 1.0);
    }

    #[test]
    fn empirical_law() {
        let e = RvSpec::empirical(vec![3.0, 1.0, 2.0, 2.0]).unwrap();
        assert_eq!(e.survival(0.0), 1.0);
        assert_eq!(e.survival(2.0), 0.25);
        assert_eq!(e.survival(3.0), 0.0);
        assert_eq!(e.quantile(0.0).unwrap(), 1.0);
        assert_eq!(e.quantile(0.25).unwrap(), 1.0);
        assert_eq!(e.quantile(0.26).unwrap(), 2.0);
        assert_eq!(e.quantile(0.9).unwrap(), 3.0);
        assert_eq!(e.quantile_breaks(), vec![0.25, 0.75]);
        assert!(RvSpec::empirical(vec![]).is_err());
        assert!(RvSpec::empirical(vec![-1.0]).is_err());
    }

    #[test]
    fn tabulated_step_and_linear() {
        let pts = vec![(1.0, 0.8), (2.0, 0.5), (4.0, 0.0)];
        let step = RvSpec::tabulated(pts.clone(), Interpolation::Step).unwrap();
        assert_eq!(step.survival(0.5), 1.0);
        assert_eq!(step.survival(1.0), 0.8);
        assert_eq!(step.survival(3.9), 0.5);
        assert_eq!(step.survival(10.0), 0.0);
        assert_eq!(step.quantile(0.3).unwrap(), 2.0);
        let lin = RvSpec::tabulated(pts, Interpolation::Linear).unwrap();
        assert!((lin.survival(3.0) - 0.25).abs() < 1e-15);
        assert!((lin.quantile(0.75).unwrap() - 3.0).abs() < 1e-12);
        assert!(RvSpec::tabulated(vec![(1.0, 0.5), (2.0, 0.6)], Interpolation::Step).is_err());
        assert!(RvSpec::tabulated(vec![(1.0, 0.5), (1.0, 0.4)], Interpolation::Step).is_err());
    }

    #[test]
    fn tabulated_floor_gives_infinite_upper_quantile() {
        let t = RvSpec::tabulated(vec![(1.0, 0.5), (2.0, 0.2)], Interpolation::Step).unwrap();
        assert_eq!(t.quantile(0.9).unwrap(), f64::INFINITY);
        let (lo, hi) = t.wedge_bounds();
        assert!(lo.unwrap().diverges());
        assert!(hi.is_none());
    }

    #[test]
    fn degenerate_sample() {
        assert_eq!(RvSpec::degenerate(3.0).unwrap().sample(99, 4), vec![3.0; 4]);
    }

    #[test]
    fn sampling_is_deterministic() {
        let s = RvSpec::scaled_pareto(1).unwrap();
        assert_eq!(s.sample(7, 100), s.sample(7, 100));
        assert_ne!(s.sample(7, 100), s.sample(8, 100));
    }

    #[test]
    fn interleaved_alphas() {
        let a = AlphaSequence::Interleaved;
        assert_eq!(a.alpha(1), 0.5);
        assert_eq!(a.alpha(2), 0.5);
        assert!((a.alpha(17) - 0.9).abs() < 1e-15);
        assert!((a.alpha(18) - 0.1).abs() < 1e-15);
    }

    #[test]
    fn interleaved_alphas_approach_both_ends() {
        let a = AlphaSequence::Interleaved;
        let mut prev = (0.0, 1.0);
        for k in [4u32, 6, 8, 10] {
            let w = 1..=(1u64 << k);
            let sup = w.clone().map(|n| a.alpha(n)).fold(0.0, f64::max);
            let inf = w.map(|n| a.alpha(n)).fold(1.0, f64::min);
            assert!(sup < 1.0 && inf > 0.0);
            assert!(sup > prev.0 && inf < prev.1);
            prev = (sup, inf);
        }
        assert!(prev.0 > 0.99 && prev.1 < 0.01);
    }

    #[test]
    fn family_window_validation() {
        let listed = FamilyKind::Listed {
            specs: vec![RvSpec::degenerate(1.0).unwrap()],
        };
        assert!(RvFamily::new(listed, IndexWindow::new(1, 2).unwrap()).is_err());
        assert!(IndexWindow::new(0, 3).is_err());
        assert!(IndexWindow::new(4, 3).is_err());
    }

    #[test]
    fn survival_argmin_hook() {
        let w = IndexWindow::new(1, 20).unwrap();
        let fam = RvFamily::new(FamilyKind::ScaledPareto, w).unwrap();
        assert_eq!(fam.survival_argmin(), Some(1));
        let mix = RvFamily::new(FamilyKind::HarmonicMixture, w).unwrap();
        assert_eq!(mix.survival_argmin(), Some(20));
        let pa = RvFamily::new(
            FamilyKind::ParetoAlpha {
                alphas: AlphaSequence::Interleaved,
            },
            w,
        )
        .unwrap();
        // smallest α in 1..=20 is α_20 = 1/11
        assert_eq!(pa.survival_argmin(), Some(20));
    }
}
