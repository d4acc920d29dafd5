//! Constructive Vallée-Poussin function for a W-UNI family.
//!
//! Breakpoints `0 = n_0 < n_1 < …` are chosen so that every block
//! `n_{j−1} < n ≤ n_j` carries survival mass `Σ S_m(j·n) > 1` for every
//! member `m`. The piecewise-linear `g` with `g(n_k) = k` then gives
//! `Σ_{n ≤ n_k} S_m(n·g(n)) ≥ k`, and `φ = h⁻¹` for `h(x) = x·g(x)` keeps
//! `{φ(|X_m|)}` W-UNI while `φ(x)/x ↓ 0`.

use serde::{Deserialize, Serialize};

use crate::error::ConstructionError;
use crate::grid::GridSpec;
use crate::models::{RvFamily, RvSpec};
use crate::report::Table;
use crate::Tolerances;

/// `n_0 = 0 < n_1 < … < n_K` with `n_1 > 2` and `n_{k+1} > 2·n_k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakpointSequence {
    points: Vec<u64>,
}

impl BreakpointSequence {
    pub fn new(points: Vec<u64>) -> Result<Self, ConstructionError> {
        if points.first() != Some(&0) {
            return Err(ConstructionError::BadBreakpoints("n_0 must be 0".into()));
        }
        if points.len() < 2 {
            return Err(ConstructionError::BadBreakpoints(
                "need at least n_1".into(),
            ));
        }
        if points[1] <= 2 {
            return Err(ConstructionError::BadBreakpoints(format!(
                "n_1 = {} must exceed 2",
                points[1]
            )));
        }
        for k in 1..points.len() - 1 {
            if points[k + 1] <= 2 * points[k] {
                return Err(ConstructionError::BadBreakpoints(format!(
                    "n_{} = {} must exceed 2·n_{} = {}",
                    k + 1,
                    points[k + 1],
                    k,
                    2 * points[k]
                )));
            }
        }
        Ok(Self { points })
    }

    fn partial(points: Vec<u64>) -> Self {
        Self { points }
    }

    /// Number of breakpoints after `n_0`.
    pub fn count(&self) -> usize {
        self.points.len() - 1
    }

    pub fn get(&self, k: usize) -> u64 {
        self.points[k]
    }

    pub fn as_slice(&self) -> &[u64] {
        &self.points
    }
}

/// Result of a successful search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BreakpointSearch {
    pub sequence: BreakpointSequence,
    /// Window infimum of the block sum achieved at each `n_j`.
    pub block_sums: Vec<f64>,
}

/// Finds the smallest admissible `n_1, …, n_count`, each bounded by `budget`.
///
/// The infimum over members is taken at the family's survival argmin when it
/// has one, otherwise over the full window.
pub fn find_breakpoints(
    family: &RvFamily,
    count: usize,
    budget: u64,
) -> Result<BreakpointSearch, ConstructionError> {
    if count == 0 {
        return Err(ConstructionError::InvalidArgument {
            name: "count",
            reason: "must be at least 1".into(),
        });
    }
    let members: Vec<RvSpec> = match family.survival_argmin() {
        Some(n) => vec![family.member(n)],
        None => family.members().map(|(_, s)| s).collect(),
    };

    let mut points = vec![0u64];
    let mut block_sums = Vec::with_capacity(count);
    for j in 1..=count {
        let prev = *points.last().expect("starts with n_0");
        let least = if j == 1 { 3 } else { 2 * prev + 1 };
        let scale = j as f64;
        let mut sums = vec![0.0; members.len()];
        let mut found = None;
        let mut n = prev + 1;
        while n <= budget {
            let x = scale * n as f64;
            let mut dead = false;
            for (sum, spec) in sums.iter_mut().zip(&members) {
                let s = spec.survival(x);
                *sum += s;
                // S is nonincreasing, so a zero term freezes this member's sum
                if s == 0.0 && *sum <= 1.0 {
                    dead = true;
                }
            }
            let inf = sums.iter().copied().fold(f64::INFINITY, f64::min);
            if n >= least && inf > 1.0 {
                found = Some((n, inf));
                break;
            }
            if dead {
                break;
            }
            n += 1;
        }
        match found {
            Some((n_j, inf)) => {
                points.push(n_j);
                block_sums.push(inf);
            }
            None => {
                return Err(ConstructionError::BudgetExhausted {
                    budget,
                    block: j,
                    partial: BreakpointSequence::partial(points),
                    block_sums,
                    stalled_sum: sums.iter().copied().fold(f64::INFINITY, f64::min),
                });
            }
        }
    }
    Ok(BreakpointSearch {
        sequence: BreakpointSequence::new(points)?,
        block_sums,
    })
}

/// `g(x) = k + (x − n_k)/(n_{k+1} − n_k)` on `[n_k, n_{k+1})`, continued
/// with the last slope beyond `n_K`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewiseLinearG {
    breakpoints: BreakpointSequence,
}

impl PiecewiseLinearG {
    pub fn new(breakpoints: BreakpointSequence) -> Self {
        Self { breakpoints }
    }

    pub fn breakpoints(&self) -> &BreakpointSequence {
        &self.breakpoints
    }

    /// Slope of `g` on `[n_{k−1}, n_k]`, `k ≥ 1`.
    pub fn slope_into(&self, k: usize) -> f64 {
        let p = self.breakpoints.as_slice();
        1.0 / (p[k] - p[k - 1]) as f64
    }

    pub fn eval(&self, x: f64) -> f64 {
        let p = self.breakpoints.as_slice();
        let last = p.len() - 1;
        if x >= p[last] as f64 {
            return last as f64 + (x - p[last] as f64) * self.slope_into(last);
        }
        let k = p.partition_point(|&n| n as f64 <= x).saturating_sub(1);
        k as f64 + (x - p[k] as f64) / (p[k + 1] - p[k]) as f64
    }
}

/// `φ = h⁻¹` with `h(x) = x·g(x)`, inverted by bisection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiFunction {
    g: PiecewiseLinearG,
    invert_rel: f64,
}

impl PhiFunction {
    pub fn new(g: PiecewiseLinearG, invert_rel: f64) -> Self {
        Self { g, invert_rel }
    }

    pub fn g(&self) -> &PiecewiseLinearG {
        &self.g
    }

    pub fn h(&self, x: f64) -> f64 {
        x * self.g.eval(x)
    }

    /// `h(n_K)`: beyond it `φ` relies on the extrapolated last segment of `g`.
    pub fn tabulated_limit(&self) -> f64 {
        let p = self.g.breakpoints.as_slice();
        let last = p.len() - 1;
        p[last] as f64 * last as f64
    }

    pub fn is_extrapolated(&self, y: f64) -> bool {
        y > self.tabulated_limit()
    }

    pub fn eval(&self, y: f64) -> f64 {
        if y <= 0.0 {
            return 0.0;
        }
        let p = self.g.breakpoints.as_slice();
        // h(n_k) = k·n_k
        let hk = |k: usize| k as f64 * p[k] as f64;
        let last = p.len() - 1;
        let (mut lo, mut hi) = if y >= hk(last) {
            if y == hk(last) {
                return p[last] as f64;
            }
            let lo = p[last] as f64;
            let mut hi = 2.0 * lo;
            while self.h(hi) < y {
                hi *= 2.0;
            }
            (lo, hi)
        } else {
            let k = (1..=last).find(|&k| y < hk(k)).expect("y below h(n_K)") - 1;
            if y == hk(k) {
                return p[k] as f64;
            }
            (p[k] as f64, p[k + 1] as f64)
        };
        for _ in 0..400 {
            if hi - lo <= self.invert_rel * hi {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if self.h(mid) < y {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Rows `(x, g(x), h(x), φ(x))` on `grid`, flagging use of the continuation.
    pub fn sample_table(&self, grid: &GridSpec) -> Vec<PhiSample> {
        let p = self.g.breakpoints.as_slice();
        let last = p[p.len() - 1] as f64;
        grid.values()
            .into_iter()
            .map(|x| PhiSample {
                x,
                g: self.g.eval(x),
                h: self.h(x),
                phi: self.eval(x),
                g_extrapolated: x > last,
                phi_extrapolated: self.is_extrapolated(x),
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhiSample {
    pub x: f64,
    pub g: f64,
    pub h: f64,
    pub phi: f64,
    /// `x > n_K`: `g(x)` and `h(x)` use the continued last segment.
    pub g_extrapolated: bool,
    /// `x > h(n_K)`: `φ(x)` does.
    pub phi_extrapolated: bool,
}

/// Columns `k, n_k, g_slope`, where `g_slope` is the slope on `[n_{k−1}, n_k]`.
pub fn breakpoint_table(seq: &BreakpointSequence) -> Table {
    let g = PiecewiseLinearG::new(seq.clone());
    let mut t = Table::new("breakpoints", &["k", "n_k", "g_slope"]);
    for k in 1..=seq.count() {
        t.push(vec![k.into(), seq.get(k).into(), g.slope_into(k).into()]);
    }
    t
}

/// 100-point log grid on `[0.01, 10·n_K]`.
pub fn default_phi_grid(seq: &BreakpointSequence) -> GridSpec {
    GridSpec::log(0.01, 10.0 * seq.get(seq.count()) as f64, 100).expect("n_K > 2")
}

/// Columns `x, g, h, phi, g_extrapolated, phi_extrapolated`.
pub fn phi_table(phi: &PhiFunction, grid: &GridSpec) -> Table {
    let mut t = Table::new(
        "phi",
        &["x", "g", "h", "phi", "g_extrapolated", "phi_extrapolated"],
    );
    for r in phi.sample_table(grid) {
        t.push(vec![
            r.x.into(),
            r.g.into(),
            r.h.into(),
            r.phi.into(),
            r.g_extrapolated.into(),
            r.phi_extrapolated.into(),
        ]);
    }
    t
}

/// Builds `g` and `φ` from found breakpoints.
pub fn build_phi(breakpoints: BreakpointSequence, tol: &Tolerances) -> PhiFunction {
    PhiFunction::new(PiecewiseLinearG::new(breakpoints), tol.invert_rel)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VerifyCheck {
    /// `Σ_{n_{k−1} < n ≤ n_k} S_m(k·n) > 1`
    BlockCondition,
    /// `Σ_{n ≤ n_k} S_m(n·g(n)) ≥ k`
    SumBound,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiViolation {
    pub m: u64,
    pub k: usize,
    pub check: VerifyCheck,
    pub value: f64,
    pub required: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiVerification {
    pub k_max: usize,
    pub passed: bool,
    pub first_violation: Option<PhiViolation>,
    /// Window infimum of `Σ_{n ≤ n_k} S_m(n·g(n))` for `k = 1..=k_max`.
    pub inf_sums: Vec<f64>,
    /// Largest `|P(φ(|X_m|) > n) − S_m(h(n))|` over the window and the first
    /// `identity_terms` values of `n`,
    /// with the left side evaluated through a numeric inverse of `φ`.
    pub identity_gap: f64,
    /// Number of leading terms `n` covered by `identity_gap`.
    pub identity_terms: u64,
}

/// Cap on the terms checked through the numeric inverse of `φ`.
pub const IDENTITY_TERMS: u64 = 4096;

/// Smallest `x` with `φ(x) ≥ y`, found by bisection on `φ` alone.
fn phi_preimage(phi: &PhiFunction, y: f64) -> f64 {
    let mut lo = 0.0;
    let mut hi = 1.0;
    while phi.eval(hi) < y {
        lo = hi;
        hi *= 2.0;
    }
    for _ in 0..200 {
        if hi - lo <= 1e-14 * hi {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if phi.eval(mid) < y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Checks the block condition and the resulting sum bound for every member of
/// the window and every `k ≤ k_max`; reports the first violated `(m, k)`.
pub fn verify_phi(
    family: &RvFamily,
    phi: &PhiFunction,
    k_max: usize,
) -> Result<PhiVerification, ConstructionError> {
    let bp = phi.g().breakpoints();
    if k_max > bp.count() {
        return Err(ConstructionError::InvalidArgument {
            name: "k_max",
            reason: format!("{} exceeds the {} available breakpoints", k_max, bp.count()),
        });
    }
    let p = bp.as_slice();
    let n_top = p[k_max];
    let hn: Vec<f64> = (1..=n_top).map(|n| phi.h(n as f64)).collect();
    let identity_terms = n_top.min(IDENTITY_TERMS);
    let pre: Vec<f64> = (1..=identity_terms)
        .map(|n| phi_preimage(phi, n as f64))
        .collect();

    let mut first_violation = None;
    let mut inf_sums = vec![f64::INFINITY; k_max];
    let mut identity_gap: f64 = 0.0;
    for (m, spec) in family.members() {
        let mut running = 0.0;
        for k in 1..=k_max {
            let block: f64 = (p[k - 1] + 1..=p[k])
                .map(|n| spec.survival(k as f64 * n as f64))
                .sum();
            running += (p[k - 1] + 1..=p[k])
                .map(|n| spec.survival(hn[(n - 1) as usize]))
                .sum::<f64>();
            inf_sums[k - 1] = inf_sums[k - 1].min(running);
            if first_violation.is_none() {
                if block <= 1.0 {
                    first_violation = Some(PhiViolation {
                        m,
                        k,
                        check: VerifyCheck::BlockCondition,
                        value: block,
                        required: 1.0,
                    });
                } else if running < k as f64 {
                    first_violation = Some(PhiViolation {
                        m,
                        k,
                        check: VerifyCheck::SumBound,
                        value: running,
                        required: k as f64,
                    });
                }
            }
        }
        for (x_h, x_pre) in hn.iter().zip(&pre) {
            identity_gap = identity_gap.max((spec.survival(*x_pre) - spec.survival(*x_h)).abs());
        }
    }
    Ok(PhiVerification {
        k_max,
        passed: first_violation.is_none(),
        first_violation,
        inf_sums,
        identity_gap,
        identity_terms,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingleLawReport {
    pub search: BreakpointSearch,
    pub phi: PhiFunction,
    /// `Σ_{n ≤ n_k} S(n·g(n))` for `k = 1..=count`; each is at least `k`.
    pub certificate: Vec<f64>,
}

/// Single-variable construction: wraps `spec` as a one-member family.
pub fn corollary_single(
    spec: &RvSpec,
    count: usize,
    budget: u64,
    tol: &Tolerances,
) -> Result<SingleLawReport, ConstructionError> {
    let family = RvFamily::single(spec.clone());
    let search = find_breakpoints(&family, count, budget)?;
    let phi = build_phi(search.sequence.clone(), tol);
    let verification = verify_phi(&family, &phi, count)?;
    Ok(SingleLawReport {
        search,
        phi,
        certificate: verification.inf_sums,
    })
}
