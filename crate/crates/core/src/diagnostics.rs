//! Window infima of the criterion functionals, verdicts, and the α–M check.
//!
//! Every curve records the minimum over the family's index window at each
//! abscissa, the smallest index attaining it, and (when the family carries
//! hooks) analytic bounds on the infimum over *all* indices. The window
//! minimum always dominates the full infimum, so only a lower hook can be
//! compared against curve values; a certified divergence needs a diverging
//! lower hook that every window value respects.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundFn;
use crate::error::{ModelError, Result};
use crate::grid::GridSpec;
use crate::models::{IndexWindow, RvFamily, RvSpec};
use crate::quadrature::QuadOptions;
use crate::truncation::{
    left_partial_moment, preferred_method, quantile_integral, restricted_mean, tail_sums,
    wedge_mean,
};
use crate::Tolerances;

/// Ties within this (scaled) distance of the minimum go to the smallest index.
pub const ARGMIN_TIE: f64 = 1e-12;
/// Slack allowed when checking curve values against a lower hook.
pub const HOOK_SLACK: f64 = 1e-9;
/// Survival level counted as "escaped" by the escape probe.
pub const ESCAPE_LEVEL: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Functional {
    /// `E(|X_n| ∧ a)`
    Wedge,
    /// `E(|X_n| : |X_n| ≤ a)`
    Restricted,
    /// `Σ_{k=0}^m P(|X_n| > k)`
    TailSum,
    /// `P(|X_n| ≤ a)`
    NotExceeding,
    /// `∫_0^α Q_n(u) du`
    LeftPartialMoment,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveHooks {
    pub lower: Option<BoundFn>,
    pub upper: Option<BoundFn>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfCurve {
    pub functional: Functional,
    pub grid: Option<GridSpec>,
    pub window: IndexWindow,
    pub abscissa: Vec<f64>,
    pub values: Vec<f64>,
    pub argmin_index: Vec<u64>,
    pub hooks: CurveHooks,
    pub bound_lo: Option<Vec<f64>>,
    pub bound_hi: Option<Vec<f64>>,
}

impl InfCurve {
    fn with_hooks(mut self, hooks: CurveHooks) -> Self {
        self.bound_lo = hooks
            .lower
            .as_ref()
            .map(|b| self.abscissa.iter().map(|&a| b.eval(a)).collect());
        self.bound_hi = hooks
            .upper
            .as_ref()
            .map(|b| self.abscissa.iter().map(|&a| b.eval(a)).collect());
        self.hooks = hooks;
        self
    }

    /// First abscissa where a value falls below the lower hook.
    pub fn lower_hook_violation(&self) -> Option<f64> {
        let lo = self.bound_lo.as_ref()?;
        self.values
            .iter()
            .zip(lo)
            .zip(&self.abscissa)
            .find(|((v, b), _)| **v < **b - HOOK_SLACK * b.abs().max(1.0))
            .map(|(_, a)| *a)
    }
}

/// Minimum of `values` and the first index within [`ARGMIN_TIE`] of it.
fn window_min(values: &[f64], first_index: u64) -> (f64, u64) {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let tie = ARGMIN_TIE * min.abs().max(1.0);
    let pos = values.iter().position(|v| *v <= min + tie).unwrap_or(0);
    (min, first_index + pos as u64)
}

fn member_value(functional: Functional, spec: &RvSpec, x: f64, tol: &Tolerances) -> Result<f64> {
    let method = preferred_method(spec, tol.quadrature());
    Ok(match functional {
        Functional::Wedge => wedge_mean(spec, x, method)?.value,
        Functional::Restricted => restricted_mean(spec, x, method)?.value,
        Functional::NotExceeding => 1.0 - spec.survival(x),
        Functional::LeftPartialMoment => left_partial_moment(spec, x, method)?.value,
        Functional::TailSum => unreachable!("tail sums are evaluated on integer levels"),
    })
}

fn grid_curve(
    family: &RvFamily,
    abscissa: Vec<f64>,
    grid: Option<GridSpec>,
    functional: Functional,
    tol: &Tolerances,
) -> Result<InfCurve> {
    let members: Vec<(u64, RvSpec)> = family.members().collect();
    let window = family.window();
    let rows: Vec<(f64, u64)> = abscissa
        .par_iter()
        .map(|&x| {
            let vals = members
                .iter()
                .map(|(_, spec)| member_value(functional, spec, x, tol))
                .collect::<Result<Vec<f64>>>()?;
            Ok(window_min(&vals, window.min))
        })
        .collect::<Result<_>>()?;
    let (values, argmin_index) = rows.into_iter().unzip();
    Ok(InfCurve {
        functional,
        grid,
        window,
        abscissa,
        values,
        argmin_index,
        hooks: CurveHooks::default(),
        bound_lo: None,
        bound_hi: None,
    })
}

fn checked_grid(grid: &GridSpec) -> Result<Vec<f64>> {
    grid.validate()?;
    Ok(grid.values())
}

/// `a ↦ min_{n ∈ window} E(|X_n| ∧ a)`.
pub fn inf_wedge_curve(family: &RvFamily, grid: &GridSpec, tol: &Tolerances) -> Result<InfCurve> {
    let hooks = family.hooks();
    Ok(grid_curve(
        family,
        checked_grid(grid)?,
        Some(*grid),
        Functional::Wedge,
        tol,
    )?
    .with_hooks(CurveHooks {
        lower: hooks.wedge_lower.clone(),
        upper: hooks.wedge_upper.clone(),
    }))
}

/// `a ↦ min_{n ∈ window} E(|X_n| : |X_n| ≤ a)`.
pub fn inf_restricted_curve(
    family: &RvFamily,
    grid: &GridSpec,
    tol: &Tolerances,
) -> Result<InfCurve> {
    let hooks = family.hooks();
    Ok(grid_curve(
        family,
        checked_grid(grid)?,
        Some(*grid),
        Functional::Restricted,
        tol,
    )?
    .with_hooks(CurveHooks {
        lower: hooks.restricted_lower.clone(),
        upper: hooks.restricted_upper.clone(),
    }))
}

/// `a ↦ min_{n ∈ window} P(|X_n| ≤ a)`, whose limit is `β`.
pub fn beta_curve(family: &RvFamily, grid: &GridSpec) -> Result<InfCurve> {
    Ok(grid_curve(
        family,
        checked_grid(grid)?,
        Some(*grid),
        Functional::NotExceeding,
        &Tolerances::default(),
    )?
    .with_hooks(CurveHooks {
        lower: None,
        upper: family.hooks().beta_upper.clone(),
    }))
}

/// `m ↦ min_{k ∈ window} Σ_{n=0}^m P(|X_k| > n)` for `m = 1..=m_max`.
///
/// Hooks are carried over from the wedge hooks through the two Fubini
/// bounds: the tail sum at `m` dominates `E(|X| ∧ (m+1))` and is dominated
/// by `1 + E(|X| ∧ m)`.
pub fn inf_tailsum_curve(family: &RvFamily, m_max: u64) -> Result<InfCurve> {
    if m_max < 1 {
        return Err(ModelError::InvalidParameter {
            name: "m_max",
            value: m_max as f64,
            reason: "must be at least 1",
        }
        .into());
    }
    let members: Vec<RvSpec> = family.members().map(|(_, s)| s).collect();
    let sums: Vec<Vec<f64>> = members.par_iter().map(|s| tail_sums(s, m_max)).collect();
    let window = family.window();
    let (values, argmin_index): (Vec<f64>, Vec<u64>) = (1..=m_max as usize)
        .map(|m| {
            let col: Vec<f64> = sums.iter().map(|row| row[m]).collect();
            window_min(&col, window.min)
        })
        .unzip();
    let hooks = family.hooks();
    let curve = InfCurve {
        functional: Functional::TailSum,
        grid: None,
        window,
        abscissa: (1..=m_max).map(|m| m as f64).collect(),
        values,
        argmin_index,
        hooks: CurveHooks::default(),
        bound_lo: None,
        bound_hi: None,
    };
    Ok(curve.with_hooks(CurveHooks {
        lower: hooks.wedge_lower.clone().map(|b| BoundFn::Offset {
            add: 0.0,
            shift: 1.0,
            inner: Box::new(b),
        }),
        upper: hooks.wedge_upper.clone().map(|b| BoundFn::Offset {
            add: 1.0,
            shift: 0.0,
            inner: Box::new(b),
        }),
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Criterion {
    #[serde(rename = "UNI")]
    Uni,
    #[serde(rename = "W-UNI")]
    WUni,
    #[serde(rename = "W*-UNI")]
    WStarUni,
    #[serde(rename = "NI-single")]
    NiSingle,
    #[serde(rename = "beta-positive")]
    BetaPositive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictStatus {
    CertifiedDiverges,
    CertifiedBoundedInf,
    NumericTrend,
    Inconclusive,
}

/// Least-squares fit of curve value against `ln a` over the top decade.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrendFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: usize,
    pub from: f64,
    pub to: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HookRole {
    Lower,
    Upper,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HookUse {
    pub role: HookRole,
    pub bound: BoundFn,
    pub description: String,
    /// Limit of the bound as `a → ∞`; absent when it diverges.
    pub limit: Option<f64>,
}

impl HookUse {
    fn new(role: HookRole, bound: &BoundFn) -> Self {
        let l = bound.limit();
        Self {
            role,
            bound: bound.clone(),
            description: bound.describe(),
            limit: l.is_finite().then_some(l),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Evidence {
    pub hook: Option<HookUse>,
    pub trend: Option<TrendFit>,
    pub tail_trend: Option<TrendFit>,
    pub last_value: f64,
    /// Abscissa where the lower hook was violated, if any.
    pub lower_hook_violation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Verdict {
    pub criterion: Criterion,
    pub status: VerdictStatus,
    /// Whether the criterion holds, when certified.
    pub holds: Option<bool>,
    pub evidence: Evidence,
}

/// Least-squares slope of `values` against `ln(abscissa)` over the points
/// with abscissa in the top decade; falls back to the whole curve when the
/// decade holds fewer than two points.
pub fn fit_trend(abscissa: &[f64], values: &[f64]) -> Option<TrendFit> {
    let top = *abscissa.last()?;
    let mut pts: Vec<(f64, f64)> = abscissa
        .iter()
        .zip(values)
        .filter(|(a, _)| **a >= top / 10.0)
        .map(|(a, v)| (a.ln(), *v))
        .collect();
    if pts.len() < 2 {
        pts = abscissa
            .iter()
            .zip(values)
            .map(|(a, v)| (a.ln(), *v))
            .collect();
    }
    if pts.len() < 2 || pts.iter().any(|p| !p.1.is_finite()) {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some(TrendFit {
        slope,
        intercept: my - slope * mx,
        points: pts.len(),
        from: pts[0].0.exp(),
        to: pts[pts.len() - 1].0.exp(),
    })
}

/// Renders one verdict from a curve and its hooks.
pub fn verdict_for(criterion: Criterion, curve: &InfCurve) -> Verdict {
    let trend = fit_trend(&curve.abscissa, &curve.values);
    let violation = curve.lower_hook_violation();
    let last_value = curve.values.last().copied().unwrap_or(f64::NAN);
    let evidence = |hook| Evidence {
        hook,
        trend,
        tail_trend: None,
        last_value,
        lower_hook_violation: violation,
    };
    if let Some(lo) = curve.hooks.lower.as_ref().filter(|b| b.diverges()) {
        if violation.is_none() {
            return Verdict {
                criterion,
                status: VerdictStatus::CertifiedDiverges,
                holds: (criterion != Criterion::BetaPositive).then_some(true),
                evidence: evidence(Some(HookUse::new(HookRole::Lower, lo))),
            };
        }
    }
    if let Some(hi) = curve.hooks.upper.as_ref().filter(|b| b.limit().is_finite()) {
        let holds = if criterion == Criterion::BetaPositive {
            (hi.limit() <= 0.0).then_some(false)
        } else {
            Some(false)
        };
        return Verdict {
            criterion,
            status: VerdictStatus::CertifiedBoundedInf,
            holds,
            evidence: evidence(Some(HookUse::new(HookRole::Upper, hi))),
        };
    }
    Verdict {
        criterion,
        status: if trend.is_some() {
            VerdictStatus::NumericTrend
        } else {
            VerdictStatus::Inconclusive
        },
        holds: None,
        evidence: evidence(None),
    }
}

/// All curves used by [`classify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSet {
    pub wedge: InfCurve,
    pub restricted: InfCurve,
    pub beta: InfCurve,
    pub tail_sum: InfCurve,
}

/// Full diagnostic output for one family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticReport {
    pub schema_version: u32,
    pub family: String,
    pub window: IndexWindow,
    pub a_grid: GridSpec,
    pub m_max: u64,
    pub verdicts: Vec<Verdict>,
    pub curves: CurveSet,
}

pub const REPORT_SCHEMA_VERSION: u32 = 1;

impl DiagnosticReport {
    pub fn verdict(&self, criterion: Criterion) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.criterion == criterion)
    }
}

/// Evaluates every curve and renders W-UNI, UNI, W\*-UNI and β verdicts.
pub fn analyze(
    family: &RvFamily,
    grid: &GridSpec,
    m_max: u64,
    tol: &Tolerances,
) -> Result<DiagnosticReport> {
    let curves = CurveSet {
        wedge: inf_wedge_curve(family, grid, tol)?,
        restricted: inf_restricted_curve(family, grid, tol)?,
        beta: beta_curve(family, grid)?,
        tail_sum: inf_tailsum_curve(family, m_max)?,
    };
    let verdicts = vec![
        verdict_for(Criterion::WUni, &curves.wedge),
        verdict_for(Criterion::Uni, &curves.restricted),
        verdict_for(Criterion::WStarUni, &curves.tail_sum),
        verdict_for(Criterion::BetaPositive, &curves.beta),
    ];
    Ok(DiagnosticReport {
        schema_version: REPORT_SCHEMA_VERSION,
        family: family.describe(),
        window: family.window(),
        a_grid: *grid,
        m_max,
        verdicts,
        curves,
    })
}

/// Verdicts for each criterion, rendered independently.
pub fn classify(
    family: &RvFamily,
    grid: &GridSpec,
    m_max: u64,
    tol: &Tolerances,
) -> Result<Vec<Verdict>> {
    Ok(analyze(family, grid, m_max, tol)?.verdicts)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaTrace {
    pub alpha: f64,
    pub inf_lpm: f64,
    pub argmin_index: u64,
}

/// Outcome of the α–M search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaMReport {
    pub m_target: f64,
    pub alpha_found: Option<f64>,
    pub inf_lpm_at_alpha: Option<f64>,
    pub trace: Vec<AlphaTrace>,
}

/// Searches the α grid for the smallest α with `min_n LPM_n(α) ≥ M`.
///
/// Among events `A` with `P(A) ≥ α`, `E(|X| : A)` is smallest when `A`
/// collects the lowest `α` of the mass of `|X|`, which is `LPM(α)`. The
/// implication "`P(A_n) ≥ α` for all n ⇒ `E(|X_n| : A_n) ≥ M` for all n"
/// therefore holds exactly when the window infimum of `LPM_n(α)` is `≥ M`.
pub fn thm31_check(
    family: &RvFamily,
    m_target: f64,
    alpha_grid: &GridSpec,
    tol: &Tolerances,
) -> Result<AlphaMReport> {
    if !(m_target > 0.0 && m_target.is_finite()) {
        return Err(ModelError::InvalidParameter {
            name: "M",
            value: m_target,
            reason: "must be finite and positive",
        }
        .into());
    }
    if alpha_grid.max >= 1.0 {
        return Err(ModelError::BadGrid(format!(
            "alpha grid max = {} must be below 1",
            alpha_grid.max
        ))
        .into());
    }
    let curve = grid_curve(
        family,
        checked_grid(alpha_grid)?,
        Some(*alpha_grid),
        Functional::LeftPartialMoment,
        tol,
    )?;
    let trace: Vec<AlphaTrace> = curve
        .abscissa
        .iter()
        .zip(&curve.values)
        .zip(&curve.argmin_index)
        .map(|((&alpha, &inf_lpm), &argmin_index)| AlphaTrace {
            alpha,
            inf_lpm,
            argmin_index,
        })
        .collect();
    let hit = trace.iter().find(|t| t.inf_lpm >= m_target);
    Ok(AlphaMReport {
        m_target,
        alpha_found: hit.map(|t| t.alpha),
        inf_lpm_at_alpha: hit.map(|t| t.inf_lpm),
        trace,
    })
}

/// `E(|X| : A)` for the event `A = {U ∈ ∪ bands}` with `|X| = Q(U)`,
/// `U` uniform on `[0, 1)`.
pub fn band_restricted_mean(spec: &RvSpec, bands: &[(f64, f64)], tol: &Tolerances) -> Result<f64> {
    let opts = QuadOptions::new(tol.quad_abs, tol.quad_rel);
    let mut total = 0.0;
    for &(lo, hi) in bands {
        if !(0.0 <= lo && lo <= hi && hi < 1.0) {
            return Err(ModelError::InvalidParameter {
                name: "band",
                value: hi,
                reason: "bands must satisfy 0 ≤ lo ≤ hi < 1",
            }
            .into());
        }
        total += quantile_integral(spec, lo, hi, opts)?.0;
    }
    Ok(total)
}

/// Disjoint quantile bands of total mass at least `alpha`.
fn random_bands(rng: &mut ChaCha8Rng, alpha: f64) -> Vec<(f64, f64)> {
    let k = rng.random_range(1..=4usize);
    let r: f64 = rng.random();
    let mass = alpha + 0.5 * (1.0 - alpha) * r * r;
    let gap_total = 1.0 - mass;
    // keep the top band away from u = 1, where Q may blow up
    let tail_gap = gap_total * (0.5 + 0.5 * rng.random::<f64>());
    let free_gap = gap_total - tail_gap;

    let mut gaps: Vec<f64> = (0..k).map(|_| rng.random()).collect();
    if rng.random_bool(0.5) {
        gaps[0] = 0.0;
    }
    let gsum: f64 = gaps.iter().sum();
    let lens: Vec<f64> = (0..k).map(|_| rng.random::<f64>() + 1e-3).collect();
    let lsum: f64 = lens.iter().sum();

    let mut u = 0.0;
    let mut bands = Vec::with_capacity(k);
    for i in 0..k {
        if gsum > 0.0 {
            u += free_gap * gaps[i] / gsum;
        }
        let len = mass * lens[i] / lsum;
        bands.push((u, (u + len).min(1.0 - tail_gap)));
        u += len;
    }
    bands
}

/// Randomized search over events of mass `≥ alpha`; returns the smallest
/// `E(|X| : A)` found. Never undercuts `LPM(alpha)` beyond quadrature error.
pub fn adversarial_event_search(
    spec: &RvSpec,
    alpha: f64,
    trials: usize,
    seed: u64,
    tol: &Tolerances,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(ModelError::InvalidParameter {
            name: "alpha",
            value: alpha,
            reason: "must lie in (0, 1)",
        }
        .into());
    }
    if trials == 0 {
        return Err(ModelError::InvalidParameter {
            name: "trials",
            value: 0.0,
            reason: "must be at least 1",
        }
        .into());
    }
    let results: Vec<f64> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(t as u64);
            let bands = random_bands(&mut rng, alpha);
            band_restricted_mean(spec, &bands, tol)
        })
        .collect::<Result<_>>()?;
    Ok(results.into_iter().fold(f64::INFINITY, f64::min))
}

/// Survival table `S_n(K)` over levels and window indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeCurve {
    pub levels: Vec<f64>,
    pub window: IndexWindow,
    /// `survival[i][j] = P(|X_{min+j}| > levels[i])`
    pub survival: Vec<Vec<f64>>,
    /// Smallest index with `S_n(K) ≥ ESCAPE_LEVEL`.
    pub first_escaped: Vec<Option<u64>>,
    /// Smallest index with `S_n(K) = 1`.
    pub first_certain: Vec<Option<u64>>,
}

pub fn escape_probability_curve(family: &RvFamily, k_grid: &GridSpec) -> Result<EscapeCurve> {
    let levels = checked_grid(k_grid)?;
    let window = family.window();
    let members: Vec<(u64, RvSpec)> = family.members().collect();
    let survival: Vec<Vec<f64>> = levels
        .par_iter()
        .map(|&k| members.iter().map(|(_, s)| s.survival(k)).collect())
        .collect();
    let first = |row: &Vec<f64>, level: f64| {
        row.iter()
            .position(|s| *s >= level)
            .map(|p| window.min + p as u64)
    };
    Ok(EscapeCurve {
        first_escaped: survival.iter().map(|r| first(r, ESCAPE_LEVEL)).collect(),
        first_certain: survival.iter().map(|r| first(r, 1.0)).collect(),
        levels,
        window,
        survival,
    })
}

/// Single-variable nonintegrability evidence from the growth of
/// `E(|X| ∧ a)` and of the tail sums, certified through the law's own
/// analytic bounds.
pub fn ni_evidence(
    spec: &RvSpec,
    grid: &GridSpec,
    m_max: u64,
    tol: &Tolerances,
) -> Result<Verdict> {
    let family = RvFamily::single(spec.clone());
    let wedge = inf_wedge_curve(&family, grid, tol)?;
    let tail = inf_tailsum_curve(&family, m_max)?;
    let w = verdict_for(Criterion::NiSingle, &wedge);
    let t = verdict_for(Criterion::NiSingle, &tail);
    let status = if w.status == t.status {
        w.status
    } else if matches!(
        w.status,
        VerdictStatus::CertifiedDiverges | VerdictStatus::CertifiedBoundedInf
    ) {
        // certified route disagrees with the other: do not certify
        VerdictStatus::NumericTrend
    } else {
        w.status
    };
    let holds = match status {
        VerdictStatus::CertifiedDiverges => Some(true),
        VerdictStatus::CertifiedBoundedInf => Some(false),
        _ => None,
    };
    Ok(Verdict {
        criterion: Criterion::NiSingle,
        status,
        holds,
        evidence: Evidence {
            tail_trend: t.evidence.trend,
            lower_hook_violation: w
                .evidence
                .lower_hook_violation
                .or(t.evidence.lower_hook_violation),
            ..w.evidence
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{AlphaSequence, FamilyKind};
    use std::f64::consts::E;

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    fn family(kind: FamilyKind, max: u64) -> RvFamily {
        RvFamily::new(kind, IndexWindow::new(1, max).unwrap()).unwrap()
    }

    fn single_point(a: f64) -> GridSpec {
        GridSpec::linear(a, a * (1.0 + 1e-9), 2).unwrap()
    }

    #[test]
    fn wedge_curve_scaled_pareto() {
        let fam = family(FamilyKind::ScaledPareto, 50);
        let c = inf_wedge_curve(&fam, &single_point(E * E), &tol()).unwrap();
        assert!((c.values[0] - 3.0).abs() < 1e-12);
        assert_eq!(c.argmin_index[0], 1);
        assert!(c.lower_hook_violation().is_none());
    }

    #[test]
    fn wedge_curve_degenerate_family() {
        let fam = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(5.0).unwrap(),
            },
            10,
        );
        let c = inf_wedge_curve(&fam, &GridSpec::linear(5.0, 9.0, 5).unwrap(), &tol()).unwrap();
        assert!(c.values.iter().all(|v| *v == 5.0));
        assert!(c.argmin_index.iter().all(|i| *i == 1));
    }

    #[test]
    fn wedge_curve_harmonic_mixture() {
        let n = 40;
        let fam = family(FamilyKind::HarmonicMixture, n);
        let c = inf_wedge_curve(&fam, &single_point(E), &tol()).unwrap();
        assert!((c.values[0] - 2.0 / n as f64).abs() < 1e-12);
        assert_eq!(c.argmin_index[0], n);
    }

    #[test]
    fn restricted_curve_examples() {
        let fam = family(FamilyKind::ScaledPareto, 100);
        let c = inf_restricted_curve(&fam, &GridSpec::log(1.0, 100.0, 9).unwrap(), &tol()).unwrap();
        assert!(c.values.iter().all(|v| *v == 0.0));
        let deg = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(5.0).unwrap(),
            },
            3,
        );
        let c = inf_restricted_curve(&deg, &single_point(3.0), &tol()).unwrap();
        assert_eq!(c.values[0], 0.0);
        let pa = family(
            FamilyKind::ParetoAlpha {
                alphas: AlphaSequence::Interleaved,
            },
            2,
        );
        let c = inf_restricted_curve(&pa, &single_point(4.0), &tol()).unwrap();
        assert!((c.values[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tailsum_curve_examples() {
        let fam = family(FamilyKind::ScaledPareto, 30);
        let c = inf_tailsum_curve(&fam, 4).unwrap();
        let h = 1.0 + 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
        assert!((c.values[3] - h).abs() < 1e-14);
        assert_eq!(c.argmin_index[3], 1);
        let deg = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(2.5).unwrap(),
            },
            5,
        );
        assert_eq!(inf_tailsum_curve(&deg, 5).unwrap().values[4], 3.0);
        assert!(inf_tailsum_curve(&deg, 0).is_err());
    }

    #[test]
    fn beta_curve_examples() {
        let n = 20;
        let fam = family(FamilyKind::ScaledPareto, n);
        let c = beta_curve(&fam, &GridSpec::linear(20.0, 80.0, 4).unwrap()).unwrap();
        for (a, v) in c.abscissa.iter().zip(&c.values) {
            assert!((v - (1.0 - n as f64 / a)).abs() < 1e-14);
        }
        let deg = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(5.0).unwrap(),
            },
            4,
        );
        assert_eq!(beta_curve(&deg, &single_point(6.0)).unwrap().values[0], 1.0);
    }

    #[test]
    fn tie_breaking_picks_smallest_index() {
        assert_eq!(window_min(&[2.0, 1.0, 1.0 + 1e-14, 1.0], 5), (1.0, 6));
    }

    #[test]
    fn trend_slope_of_log_curve() {
        let a: Vec<f64> = (0..=20).map(|i| 10f64.powf(i as f64 / 4.0)).collect();
        let v: Vec<f64> = a.iter().map(|x| 1.0 + x.ln()).collect();
        let t = fit_trend(&a, &v).unwrap();
        assert!((t.slope - 1.0).abs() < 1e-12);
        assert_eq!(t.points, 5);
    }

    #[test]
    fn classify_examples() {
        let grid = GridSpec::log(1.0, 1e6, 61).unwrap();
        let sp = family(FamilyKind::ScaledPareto, 200);
        let v = classify(&sp, &grid, 200, &tol()).unwrap();
        assert_eq!(v[0].criterion, Criterion::WUni);
        assert_eq!(v[0].status, VerdictStatus::CertifiedDiverges);
        assert_eq!(v[1].criterion, Criterion::Uni);
        assert_eq!(v[1].status, VerdictStatus::CertifiedBoundedInf);
        assert_eq!(v[2].status, VerdictStatus::CertifiedDiverges);
        assert_eq!(v[3].holds, Some(false));

        let mix = family(FamilyKind::HarmonicMixture, 200);
        let v = classify(&mix, &grid, 200, &tol()).unwrap();
        assert_eq!(v[0].status, VerdictStatus::CertifiedBoundedInf);
        assert_eq!(v[0].holds, Some(false));

        let pa = family(
            FamilyKind::ParetoAlpha {
                alphas: AlphaSequence::Interleaved,
            },
            1000,
        );
        let v = classify(&pa, &grid, 100, &tol()).unwrap();
        assert_eq!(v[0].status, VerdictStatus::CertifiedDiverges);
        let slope = v[0].evidence.trend.unwrap().slope;
        assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn alpha_m_bounded_family_never_qualifies() {
        let deg = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(5.0).unwrap(),
            },
            4,
        );
        let r = thm31_check(
            &deg,
            10.0,
            &GridSpec::linear(0.01, 0.99, 99).unwrap(),
            &tol(),
        )
        .unwrap();
        assert!(r.alpha_found.is_none());
        assert!(r.trace.iter().all(|t| t.inf_lpm <= 5.0));
    }

    #[test]
    fn alpha_m_tiny_target_takes_first_alpha() {
        let fam = family(FamilyKind::ScaledPareto, 10);
        let grid = GridSpec::linear(0.05, 0.95, 19).unwrap();
        let r = thm31_check(&fam, 1e-9, &grid, &tol()).unwrap();
        assert_eq!(r.alpha_found, Some(0.05));
        assert!(thm31_check(&fam, 0.0, &grid, &tol()).is_err());
        assert!(thm31_check(&fam, 1.0, &GridSpec::linear(0.5, 1.0, 3).unwrap(), &tol()).is_err());
    }

    #[test]
    fn adversarial_degenerate() {
        let d = RvSpec::degenerate(3.0).unwrap();
        let r = adversarial_event_search(&d, 0.4, 200, 1, &tol()).unwrap();
        assert!(r >= 3.0 * 0.4 - 1e-12);
        assert!(adversarial_event_search(&d, 0.4, 0, 1, &tol()).is_err());
    }

    #[test]
    fn minimizing_band_reaches_lpm() {
        let s = RvSpec::scaled_pareto(1).unwrap();
        let v = band_restricted_mean(&s, &[(0.0, 0.5)], &tol()).unwrap();
        assert!((v - 2f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn random_bands_have_enough_mass() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..500 {
            let b = random_bands(&mut rng, 0.3);
            let mass: f64 = b.iter().map(|(l, h)| h - l).sum();
            assert!(mass >= 0.3 - 1e-12);
            assert!(b.windows(2).all(|w| w[0].1 <= w[1].0 + 1e-15));
            assert!(b.last().unwrap().1 < 1.0);
        }
    }

    #[test]
    fn escape_examples() {
        let fam = family(FamilyKind::ScaledPareto, 10);
        let c = escape_probability_curve(&fam, &GridSpec::linear(5.0, 8.0, 4).unwrap()).unwrap();
        assert_eq!(c.survival[0][9], 1.0);
        assert_eq!(c.survival[3][1], 0.25);
        assert_eq!(c.first_certain[0], Some(5));
        let deg = family(
            FamilyKind::Constant {
                spec: RvSpec::degenerate(5.0).unwrap(),
            },
            10,
        );
        let c = escape_probability_curve(&deg, &GridSpec::linear(6.0, 7.0, 2).unwrap()).unwrap();
        assert!(c.survival[0].iter().all(|s| *s == 0.0));
        assert_eq!(c.first_escaped[0], None);
    }

    #[test]
    fn ni_evidence_examples() {
        let grid = GridSpec::log(1.0, 1e6, 61).unwrap();
        let sp = ni_evidence(&RvSpec::scaled_pareto(1).unwrap(), &grid, 1000, &tol()).unwrap();
        assert_eq!(sp.status, VerdictStatus::CertifiedDiverges);
        assert!((sp.evidence.trend.unwrap().slope - 1.0).abs() < 1e-9);
        let d = ni_evidence(&RvSpec::degenerate(5.0).unwrap(), &grid, 1000, &tol()).unwrap();
        assert_eq!(d.status, VerdictStatus::CertifiedBoundedInf);
        let mix =
            ni_evidence(&RvSpec::bernoulli_pareto(0.5).unwrap(), &grid, 1000, &tol()).unwrap();
        assert_eq!(mix.status, VerdictStatus::CertifiedDiverges);
        assert!((mix.evidence.trend.unwrap().slope - 0.5).abs() < 1e-9);
    }
}
