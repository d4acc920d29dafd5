//! Truncated moments of `|X|`: the capped ("wedge") mean `E(|X| ∧ a)`, the
//! restricted mean `E(|X| : |X| ≤ a)`, tail sums `Σ_{n=0}^m P(|X| > n)`, and
//! the left partial moment `∫_0^α Q(u) du`.
//!
//! Each functional has three backends: hard-coded closed forms for the
//! named laws, adaptive quadrature of the survival (or quantile) function,
//! and seeded Monte Carlo with a four-standard-error bound.

use serde::{Deserialize, Serialize};

use crate::error::TruncationError;
use crate::models::RvSpec;
use crate::quadrature::{integrate, QuadOptions};

/// Number of standard errors in a Monte Carlo error bound.
pub const MC_SIGMAS: f64 = 4.0;
/// Smallest admissible Monte Carlo sample count.
pub const MC_MIN_SAMPLES: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TruncationMethod {
    ClosedForm,
    Quadrature { abs_tol: f64, rel_tol: f64 },
    MonteCarlo { seed: u64, sample_count: usize },
}

impl TruncationMethod {
    pub fn quadrature() -> Self {
        let o = QuadOptions::default();
        TruncationMethod::Quadrature {
            abs_tol: o.abs_tol,
            rel_tol: o.rel_tol,
        }
    }

    fn validate(&self) -> Result<(), TruncationError> {
        match *self {
            TruncationMethod::ClosedForm => Ok(()),
            TruncationMethod::Quadrature { abs_tol, rel_tol } => {
                if abs_tol.is_nan() || abs_tol <= 0.0 {
                    return Err(invalid("abs_tol", abs_tol, "must be positive"));
                }
                if rel_tol.is_nan() || rel_tol <= 0.0 {
                    return Err(invalid("rel_tol", rel_tol, "must be positive"));
                }
                Ok(())
            }
            TruncationMethod::MonteCarlo { sample_count, .. } => {
                if sample_count < MC_MIN_SAMPLES {
                    return Err(invalid(
                        "sample_count",
                        sample_count as f64,
                        "must be at least 1000",
                    ));
                }
                Ok(())
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimateWithError {
    pub value: f64,
    pub error_bound: f64,
    pub method: TruncationMethod,
}

impl EstimateWithError {
    fn exact(value: f64) -> Self {
        Self {
            value,
            error_bound: 0.0,
            method: TruncationMethod::ClosedForm,
        }
    }
}

fn invalid(name: &'static str, value: f64, reason: &'static str) -> TruncationError {
    TruncationError::InvalidArgument {
        name,
        value,
        reason,
    }
}

fn check_level(a: f64) -> Result<(), TruncationError> {
    if a > 0.0 && a.is_finite() {
        Ok(())
    } else {
        Err(invalid(
            "a",
            a,
            "truncation level must be finite and positive",
        ))
    }
}

fn check_alpha(alpha: f64) -> Result<(), TruncationError> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(invalid("alpha", alpha, "must lie in (0, 1)"))
    }
}

/// `(a^α − 1)/α` without cancellation for small `α ln a`.
fn pow_minus_one_over(alpha: f64, a: f64) -> f64 {
    (alpha * a.ln()).exp_m1() / alpha
}

/// Closed-form `E(|X| ∧ a)`, when the law has one.
pub fn wedge_closed_form(spec: &RvSpec, a: f64) -> Option<f64> {
    match spec {
        RvSpec::ScaledPareto { scale } => {
            let n = *scale as f64;
            Some(if n >= a { a } else { n * (1.0 + (a / n).ln()) })
        }
        RvSpec::ParetoAlpha { alpha } => Some(if a <= 1.0 {
            a
        } else {
            pow_minus_one_over(*alpha, a) + 1.0
        }),
        RvSpec::BernoulliPareto { p } => Some(p * if a <= 1.0 { a } else { 1.0 + a.ln() }),
        RvSpec::Degenerate { value } => Some(value.min(a)),
        RvSpec::Scaled { base, factor } => wedge_closed_form(base, a / factor).map(|v| v * factor),
        RvSpec::Empirical(_) | RvSpec::Tabulated(_) => None,
    }
}

/// Closed-form `E(|X| : |X| ≤ a)`, when the law has one.
pub fn restricted_closed_form(spec: &RvSpec, a: f64) -> Option<f64> {
    match spec {
        RvSpec::ScaledPareto { scale } => {
            let n = *scale as f64;
            Some(if a <= n { 0.0 } else { n * (a / n).ln() })
        }
        RvSpec::ParetoAlpha { alpha } => Some(if a <= 1.0 {
            0.0
        } else {
            (1.0 - alpha) * pow_minus_one_over(*alpha, a)
        }),
        RvSpec::BernoulliPareto { p } => Some(if a < 1.0 { 0.0 } else { p * a.ln() }),
        RvSpec::Degenerate { value } => Some(if *value <= a { *value } else { 0.0 }),
        RvSpec::Scaled { base, factor } => {
            restricted_closed_form(base, a / factor).map(|v| v * factor)
        }
        RvSpec::Empirical(_) | RvSpec::Tabulated(_) => None,
    }
}

/// Closed-form `∫_0^α Q(u) du`, when the law has one.
pub fn lpm_closed_form(spec: &RvSpec, alpha: f64) -> Option<f64> {
    match spec {
        RvSpec::ScaledPareto { scale } => Some(-(*scale as f64) * (-alpha).ln_1p()),
        RvSpec::ParetoAlpha { alpha: shape } => {
            // Q(u) = (1 − u)^(−1/(1 − shape))
            let r = shape / (1.0 - shape);
            Some((-r * (-alpha).ln_1p()).exp_m1() / r)
        }
        RvSpec::BernoulliPareto { p } => Some(if alpha <= 1.0 - p {
            0.0
        } else {
            p * (p.ln() - (-alpha).ln_1p())
        }),
        RvSpec::Degenerate { value } => Some(value * alpha),
        RvSpec::Scaled { base, factor } => lpm_closed_form(base, alpha).map(|v| v * factor),
        RvSpec::Empirical(_) | RvSpec::Tabulated(_) => None,
    }
}

fn quad_opts(abs_tol: f64, rel_tol: f64) -> QuadOptions {
    QuadOptions::new(abs_tol, rel_tol)
}

/// Quadrature of `∫_0^a S(x) dx`, split at the law's break points.
fn wedge_quadrature(
    spec: &RvSpec,
    a: f64,
    opts: QuadOptions,
) -> Result<(f64, f64), TruncationError> {
    let breaks = spec.survival_breaks();
    let r = integrate(|x| spec.survival(x), 0.0, a, &breaks, opts)?;
    Ok((r.value, r.error))
}

/// Sample mean and `MC_SIGMAS` standard errors of a bounded summand.
fn mc_mean<I: Iterator<Item = f64>>(values: I) -> (f64, f64) {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    (mean, MC_SIGMAS * (var / n as f64).sqrt())
}

/// `E(|X| ∧ a)`.
pub fn wedge_mean(
    spec: &RvSpec,
    a: f64,
    method: TruncationMethod,
) -> Result<EstimateWithError, TruncationError> {
    check_level(a)?;
    method.validate()?;
    match method {
        TruncationMethod::ClosedForm => wedge_closed_form(spec, a)
            .map(EstimateWithError::exact)
            .ok_or(TruncationError::Unsupported {
                functional: "wedge_mean",
                variant: spec.variant_name(),
            }),
        TruncationMethod::Quadrature { abs_tol, rel_tol } => {
            let (value, error_bound) = wedge_quadrature(spec, a, quad_opts(abs_tol, rel_tol))?;
            Ok(EstimateWithError {
                value,
                error_bound,
                method,
            })
        }
        TruncationMethod::MonteCarlo { seed, sample_count } => {
            let samples = spec.sample(seed, sample_count);
            let (value, error_bound) = mc_mean(samples.iter().map(|x| x.min(a)));
            Ok(EstimateWithError {
                value,
                error_bound,
                method,
            })
        }
    }
}

/// Monte Carlo `E(|X| ∧ a)` at several levels from one shared sample.
///
/// Agrees exactly with [`wedge_mean`] under the same seed and count.
pub fn mc_wedge_means(
    spec: &RvSpec,
    levels: &[f64],
    seed: u64,
    sample_count: usize,
) -> Result<Vec<EstimateWithError>, TruncationError> {
    let method = TruncationMethod::MonteCarlo { seed, sample_count };
    method.validate()?;
    for &a in levels {
        check_level(a)?;
    }
    let samples = spec.sample(seed, sample_count);
    Ok(levels
        .iter()
        .map(|&a| {
            let (value, error_bound) = mc_mean(samples.iter().map(|x| x.min(a)));
            EstimateWithError {
                value,
                error_bound,
                method,
            }
        })
        .collect())
}

/// Standard error `σ/√N` of the `sample_count`-draw mean of `|X| ∧ a`, with
/// `σ² = ∫_0^a 2x·S(x) dx − (∫_0^a S(x) dx)²` by quadrature.
///
/// For heavy tails at large `a` the sample variance is itself badly skewed
/// and tends to understate `σ²`; this gives the band the estimator actually has.
pub fn mc_wedge_standard_error(
    spec: &RvSpec,
    a: f64,
    sample_count: usize,
    opts: QuadOptions,
) -> Result<f64, TruncationError> {
    check_level(a)?;
    if sample_count == 0 {
        return Err(invalid("sample_count", 0.0, "must be positive"));
    }
    let breaks = spec.survival_breaks();
    let second = integrate(|x| 2.0 * x * spec.survival(x), 0.0, a, &breaks, opts)?.value;
    let (mean, _) = wedge_quadrature(spec, a, opts)?;
    Ok(((second - mean * mean).max(0.0) / sample_count as f64).sqrt())
}

/// `E(|X| : |X| ≤ a)`, the atom at `a` included.
///
/// Non-closed-form backends go through `E(|X| ∧ a) − a·P(|X| > a)`.
pub fn restricted_mean(
    spec: &RvSpec,
    a: f64,
    method: TruncationMethod,
) -> Result<EstimateWithError, TruncationError> {
    check_level(a)?;
    method.validate()?;
    match method {
        TruncationMethod::ClosedForm => restricted_closed_form(spec, a)
            .map(EstimateWithError::exact)
            .ok_or(TruncationError::Unsupported {
                functional: "restricted_mean",
                variant: spec.variant_name(),
            }),
        _ => {
            let w = wedge_mean(spec, a, method)?;
            Ok(EstimateWithError {
                value: w.value - a * spec.survival(a),
                ..w
            })
        }
    }
}

/// `Σ_{n=0}^m P(|X| > n)`.
pub fn tail_sum(spec: &RvSpec, m: u64) -> f64 {
    (0..=m).map(|n| spec.survival(n as f64)).sum()
}

/// Running tail sums `Σ_{n=0}^k P(|X| > n)` for `k = 0..=m`.
pub fn tail_sums(spec: &RvSpec, m: u64) -> Vec<f64> {
    let mut acc = 0.0;
    (0..=m)
        .map(|n| {
            acc += spec.survival(n as f64);
            acc
        })
        .collect()
}

/// Integrates `Q` over `[lo, hi] ⊂ [0, 1)`.
pub fn quantile_integral(
    spec: &RvSpec,
    lo: f64,
    hi: f64,
    opts: QuadOptions,
) -> Result<(f64, f64), TruncationError> {
    let breaks = spec.quantile_breaks();
    let r = integrate(|u| spec.quantile_unchecked(u), lo, hi, &breaks, opts)?;
    Ok((r.value, r.error))
}

/// Left partial moment `LPM(α) = ∫_0^α Q(u) du`: the smallest restricted
/// mean `E(|X| : A)` over events with `P(A) ≥ α`.
pub fn left_partial_moment(
    spec: &RvSpec,
    alpha: f64,
    method: TruncationMethod,
) -> Result<EstimateWithError, TruncationError> {
    check_alpha(alpha)?;
    method.validate()?;
    match method {
        TruncationMethod::ClosedForm => lpm_closed_form(spec, alpha)
            .map(EstimateWithError::exact)
            .ok_or(TruncationError::Unsupported {
                functional: "left_partial_moment",
                variant: spec.variant_name(),
            }),
        TruncationMethod::Quadrature { abs_tol, rel_tol } => {
            let (value, error_bound) =
                quantile_integral(spec, 0.0, alpha, quad_opts(abs_tol, rel_tol))?;
            Ok(EstimateWithError {
                value,
                error_bound,
                method,
            })
        }
        TruncationMethod::MonteCarlo { seed, sample_count } => {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let draws = (0..sample_count).map(|_| {
                let u: f64 = rng.random();
                if u <= alpha {
                    spec.quantile_unchecked(u)
                } else {
                    0.0
                }
            });
            let (value, error_bound) = mc_mean(draws);
            Ok(EstimateWithError {
                value,
                error_bound,
                method,
            })
        }
    }
}

/// Closed form when the law has one, quadrature otherwise.
pub fn preferred_method(spec: &RvSpec, quad: TruncationMethod) -> TruncationMethod {
    if wedge_closed_form(spec, 1.0).is_some() {
        TruncationMethod::ClosedForm
    } else {
        quad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::E;

    fn quad() -> TruncationMethod {
        TruncationMethod::quadrature()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn wedge_examples() {
        let sp5 = RvSpec::scaled_pareto(5).unwrap();
        assert_eq!(
            wedge_mean(&sp5, 3.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            3.0
        );
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        assert!(close(
            wedge_mean(&sp1, E, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            2.0,
            1e-15
        ));
        // ∫_0^e min(1, 1/x) dx = 1 + ln e
        assert!(close(
            wedge_mean(&sp1, E, quad()).unwrap().value,
            2.0,
            1e-10
        ));
        let pa = RvSpec::pareto_alpha(0.5).unwrap();
        assert!(close(
            wedge_mean(&pa, 4.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            3.0,
            1e-15
        ));
        assert!(close(
            wedge_mean(&pa, 4.0, quad()).unwrap().value,
            3.0,
            1e-10
        ));
        let d = RvSpec::degenerate(7.0).unwrap();
        assert_eq!(
            wedge_mean(&d, 3.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            3.0
        );
        assert!(close(
            wedge_mean(&d, 3.0, quad()).unwrap().value,
            3.0,
            1e-12
        ));
    }

    #[test]
    fn restricted_examples() {
        let pa = RvSpec::pareto_alpha(0.5).unwrap();
        let r = restricted_mean(&pa, 4.0, TruncationMethod::ClosedForm)
            .unwrap()
            .value;
        assert!(close(r, 1.0, 1e-15));
        assert!(close(r + 4.0 * pa.survival(4.0), 3.0, 1e-15));
        let sp2 = RvSpec::scaled_pareto(2).unwrap();
        let want = 2.0 * 5f64.ln();
        assert!(close(
            restricted_mean(&sp2, 10.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            want,
            1e-15
        ));
        assert!(close(
            restricted_mean(&sp2, 10.0, quad()).unwrap().value,
            want,
            1e-10
        ));
        let d = RvSpec::degenerate(7.0).unwrap();
        assert_eq!(
            restricted_mean(&d, 3.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            0.0
        );
        // atom at the boundary counts as ≤ a
        assert_eq!(
            restricted_mean(&d, 7.0, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            7.0
        );
        assert!(close(
            restricted_mean(&d, 7.0, quad()).unwrap().value,
            7.0,
            1e-12
        ));
    }

    #[test]
    fn tail_sum_examples() {
        assert_eq!(tail_sum(&RvSpec::degenerate(2.5).unwrap(), 5), 3.0);
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        let h = 1.0 + 1.0 + 0.5 + 1.0 / 3.0 + 0.25;
        assert!((tail_sum(&sp1, 4) - h).abs() < 1e-15);
        let mix = RvSpec::bernoulli_pareto(0.4).unwrap();
        assert_eq!(tail_sum(&mix, 0), mix.survival(0.0));
        assert_eq!(tail_sums(&sp1, 4).last().copied(), Some(tail_sum(&sp1, 4)));
    }

    #[test]
    fn lpm_examples() {
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        let ln2 = 2f64.ln();
        assert!(close(
            left_partial_moment(&sp1, 0.5, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            ln2,
            1e-15
        ));
        assert!(close(
            left_partial_moment(&sp1, 0.5, quad()).unwrap().value,
            ln2,
            1e-10
        ));
        let d = RvSpec::degenerate(3.0).unwrap();
        assert!(close(
            left_partial_moment(&d, 0.4, quad()).unwrap().value,
            1.2,
            1e-12
        ));
        let pa = RvSpec::pareto_alpha(0.5).unwrap();
        assert!(close(
            left_partial_moment(&pa, 0.5, TruncationMethod::ClosedForm)
                .unwrap()
                .value,
            1.0,
            1e-14
        ));
        assert!(close(
            left_partial_moment(&pa, 0.5, quad()).unwrap().value,
            1.0,
            1e-10
        ));
    }

    #[test]
    fn mixture_lpm_closed_form_matches_quadrature() {
        for &p in &[0.25, 0.5, 1.0] {
            let mix = RvSpec::bernoulli_pareto(p).unwrap();
            for &alpha in &[0.1, 0.5, 0.9] {
                let c = left_partial_moment(&mix, alpha, TruncationMethod::ClosedForm)
                    .unwrap()
                    .value;
                let q = left_partial_moment(&mix, alpha, quad()).unwrap().value;
                assert!(close(c, q, 1e-9), "p={p} alpha={alpha}: {c} vs {q}");
            }
        }
    }

    #[test]
    fn unsupported_closed_form() {
        let e = RvSpec::empirical(vec![1.0, 2.0]).unwrap();
        assert!(matches!(
            wedge_mean(&e, 1.0, TruncationMethod::ClosedForm),
            Err(TruncationError::Unsupported { .. })
        ));
        assert!(matches!(
            restricted_mean(&e, 1.0, TruncationMethod::ClosedForm),
            Err(TruncationError::Unsupported { .. })
        ));
        // quadrature on the step survival is exact: mean of min(x, 1.5) = 1.25
        assert!(close(
            wedge_mean(&e, 1.5, quad()).unwrap().value,
            1.25,
            1e-12
        ));
    }

    #[test]
    fn argument_validation() {
        let s = RvSpec::scaled_pareto(1).unwrap();
        assert!(wedge_mean(&s, 0.0, quad()).is_err());
        assert!(wedge_mean(&s, f64::NAN, quad()).is_err());
        assert!(left_partial_moment(&s, 1.0, quad()).is_err());
        let small = TruncationMethod::MonteCarlo {
            seed: 1,
            sample_count: 10,
        };
        assert!(wedge_mean(&s, 1.0, small).is_err());
        let bad = TruncationMethod::Quadrature {
            abs_tol: 0.0,
            rel_tol: 1e-10,
        };
        assert!(wedge_mean(&s, 1.0, bad).is_err());
    }

    #[test]
    fn monte_carlo_wedge_within_bound() {
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        let mc = TruncationMethod::MonteCarlo {
            seed: 1,
            sample_count: 100_000,
        };
        let est = wedge_mean(&sp1, E, mc).unwrap();
        assert!((est.value - 2.0).abs() <= est.error_bound, "{est:?}");
        let shared = mc_wedge_means(&sp1, &[E], 1, 100_000).unwrap();
        assert_eq!(shared[0], est);
    }

    #[test]
    fn monte_carlo_lpm_within_bound() {
        let sp1 = RvSpec::scaled_pareto(1).unwrap();
        let mc = TruncationMethod::MonteCarlo {
            seed: 3,
            sample_count: 100_000,
        };
        let est = left_partial_moment(&sp1, 0.5, mc).unwrap();
        assert!((est.value - 2f64.ln()).abs() <= est.error_bound, "{est:?}");
    }
}
