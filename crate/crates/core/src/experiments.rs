//! Scripted reproductions of the worked examples.
//!
//! Each experiment returns a [`ReproductionReport`]: a set of tables for CSV
//! output and a list of [`Check`]s, each comparing a computed value against
//! a reference under a pinned tolerance.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::BoundFn;
use crate::diagnostics::{
    beta_curve, escape_probability_curve, inf_restricted_curve, inf_tailsum_curve, inf_wedge_curve,
    ni_evidence, verdict_for, Criterion, Verdict, VerdictStatus,
};
use crate::error::{ModelError, Result};
use crate::grid::GridSpec;
use crate::models::{AlphaSequence, FamilyKind, IndexWindow, RvFamily, RvSpec};
use crate::quadrature::QuadOptions;
use crate::report::{write_json, Cell, Table};
use crate::truncation::{
    mc_wedge_means, mc_wedge_standard_error, restricted_closed_form, restricted_mean, tail_sums,
    wedge_closed_form, wedge_mean, MC_SIGMAS,
};
use crate::Tolerances;

/// Relative tolerance for closed form against quadrature.
pub const CLOSED_FORM_REL: f64 = 1e-8;

pub const SUMMARY_SCHEMA_VERSION: u32 = 1;

pub const EXPERIMENT_NAMES: [&str; 4] =
    ["example-2.1", "example-2.2", "counterexample", "remark-4.3"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ToleranceKind {
    /// `|Δ| ≤ tol·max(1, |reference|)`
    Relative,
    /// `|Δ| ≤ tol`
    Absolute,
}

/// One comparison row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub label: String,
    pub input: String,
    pub value: f64,
    pub reference: f64,
    pub delta: f64,
    pub tolerance: f64,
    pub tolerance_kind: ToleranceKind,
    pub pass: bool,
}

impl Check {
    pub fn relative(label: &str, input: String, value: f64, reference: f64, tol: f64) -> Self {
        let delta = (value - reference).abs();
        Self {
            label: label.into(),
            input,
            value,
            reference,
            delta,
            tolerance: tol,
            tolerance_kind: ToleranceKind::Relative,
            pass: delta <= tol * reference.abs().max(1.0),
        }
    }

    pub fn absolute(label: &str, input: String, value: f64, reference: f64, tol: f64) -> Self {
        let delta = (value - reference).abs();
        Self {
            label: label.into(),
            input,
            value,
            reference,
            delta,
            tolerance: tol,
            tolerance_kind: ToleranceKind::Absolute,
            pass: delta <= tol,
        }
    }

    /// A yes/no condition recorded as `1` against reference `1`.
    pub fn flag(label: &str, input: String, ok: bool) -> Self {
        Self::absolute(label, input, if ok { 1.0 } else { 0.0 }, 1.0, 0.0)
    }

    /// `value ≥ floor − slack`, with the margin as delta.
    pub fn at_least(label: &str, input: String, value: f64, floor: f64, slack: f64) -> Self {
        let pass = value >= floor - slack;
        Self {
            label: label.into(),
            input,
            value,
            reference: floor,
            delta: value - floor,
            tolerance: slack,
            tolerance_kind: ToleranceKind::Absolute,
            pass,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReproductionReport {
    pub name: String,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
    pub verdicts: Vec<Verdict>,
}

impl ReproductionReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.into(),
            tables: Vec::new(),
            checks: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn checks_table(&self) -> Table {
        let mut t = Table::new(
            "checks",
            &[
                "label",
                "input",
                "value",
                "reference",
                "delta",
                "tolerance",
                "tolerance_kind",
                "pass",
            ],
        );
        for c in &self.checks {
            let kind = match c.tolerance_kind {
                ToleranceKind::Relative => "relative",
                ToleranceKind::Absolute => "absolute",
            };
            t.push(vec![
                c.label.clone().into(),
                c.input.clone().into(),
                c.value.into(),
                c.reference.into(),
                c.delta.into(),
                c.tolerance.into(),
                kind.into(),
                c.pass.into(),
            ]);
        }
        t
    }

    pub fn summary(&self) -> ReproductionSummary {
        ReproductionSummary {
            schema_version: SUMMARY_SCHEMA_VERSION,
            experiment: self.name.clone(),
            passed: self.passed(),
            check_count: self.checks.len(),
            failed: self.failures().cloned().collect(),
            verdicts: self.verdicts.clone(),
            tables: self
                .tables
                .iter()
                .map(|t| format!("{}.csv", t.name))
                .collect(),
        }
    }

    /// Writes `<dir>/<name>/<table>.csv`, `checks.csv` and `summary.json`.
    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let root = dir.join(&self.name);
        for t in &self.tables {
            t.write_csv(&root.join(format!("{}.csv", t.name)))?;
        }
        self.checks_table().write_csv(&root.join("checks.csv"))?;
        write_json(&root.join("summary.json"), &self.summary())
    }
}

/// Contents of `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReproductionSummary {
    pub schema_version: u32,
    pub experiment: String,
    pub passed: bool,
    pub check_count: usize,
    pub failed: Vec<Check>,
    pub verdicts: Vec<Verdict>,
    pub tables: Vec<String>,
}

/// Shared settings for the experiments.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub a_grid: GridSpec,
    pub k_grid: GridSpec,
    pub window: IndexWindow,
    pub m_max: u64,
    pub mc_seed: u64,
    pub mc_samples: usize,
    pub alphas: AlphaSequence,
    pub tol: Tolerances,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            a_grid: GridSpec::log(1.0, 1e6, 61).expect("valid grid"),
            k_grid: GridSpec::log(1.0, 1e3, 31).expect("valid grid"),
            window: IndexWindow::new(1, 1000).expect("valid window"),
            m_max: 1000,
            mc_seed: 0x5eed_2021,
            mc_samples: 100_000,
            alphas: AlphaSequence::Interleaved,
            tol: Tolerances::default(),
        }
    }
}

fn need_grid_past_e(grid: &GridSpec) -> Result<()> {
    grid.validate()?;
    if grid.max < std::f64::consts::E {
        return Err(ModelError::BadGrid(format!("max = {} must be at least e", grid.max)).into());
    }
    Ok(())
}

fn at(a: f64) -> String {
    format!("a={a}")
}

fn na(n: u64, a: f64) -> String {
    format!("n={n},a={a}")
}

fn status_flag(label: &str, v: &Verdict, want: VerdictStatus) -> Check {
    Check::flag(label, format!("{:?}", v.status), v.status == want)
}

/// Scaled Pareto family `X_n = nY`: W-UNI without UNI.
pub fn reproduce_example_2_1(cfg: &ExperimentConfig) -> Result<ReproductionReport> {
    need_grid_past_e(&cfg.a_grid)?;
    let mut rep = ReproductionReport::new("example-2.1");
    let grid = cfg.a_grid.values();
    let quad = cfg.tol.quadrature();
    let opts = QuadOptions::new(cfg.tol.quad_abs, cfg.tol.quad_rel);

    let mut wedge = Table::new(
        "wedge",
        &[
            "n",
            "a",
            "closed_form",
            "quadrature",
            "monte_carlo",
            "mc_bound",
            "mc_sample_bound",
            "delta_quadrature",
            "delta_monte_carlo",
        ],
    );
    let rows: Vec<_> = [1u64, 2, 5, 10, 100]
        .par_iter()
        .map(|&n| -> Result<_> {
            let spec = RvSpec::scaled_pareto(n)?;
            let mc = mc_wedge_means(&spec, &grid, cfg.mc_seed.wrapping_add(n), cfg.mc_samples)?;
            let mut rows = Vec::new();
            for (&a, m) in grid.iter().zip(mc) {
                let cf = wedge_closed_form(&spec, a).expect("closed form exists");
                let q = wedge_mean(&spec, a, quad)?.value;
                let se = mc_wedge_standard_error(&spec, a, cfg.mc_samples, opts)?;
                rows.push((n, a, cf, q, m.value, MC_SIGMAS * se, m.error_bound));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?;
    for (n, a, cf, q, mc, bound, sample_bound) in rows.into_iter().flatten() {
        wedge.push(vec![
            n.into(),
            a.into(),
            cf.into(),
            q.into(),
            mc.into(),
            bound.into(),
            sample_bound.into(),
            (q - cf).abs().into(),
            (mc - cf).abs().into(),
        ]);
        rep.checks.push(Check::relative(
            "wedge quadrature vs closed form",
            na(n, a),
            q,
            cf,
            CLOSED_FORM_REL,
        ));
        rep.checks.push(Check::absolute(
            "wedge monte carlo vs closed form",
            na(n, a),
            mc,
            cf,
            bound,
        ));
    }
    rep.tables.push(wedge);

    let spec2 = RvSpec::scaled_pareto(2)?;
    let w = wedge_mean(&spec2, 10.0, quad)?.value;
    rep.checks.push(Check::relative(
        "wedge n=2 at a=10",
        na(2, 10.0),
        w,
        2.0 * (1.0 + 5f64.ln()),
        CLOSED_FORM_REL,
    ));

    let family = RvFamily::new(FamilyKind::ScaledPareto, cfg.window)?;
    let wc = inf_wedge_curve(&family, &cfg.a_grid, &cfg.tol)?;
    let rc = inf_restricted_curve(&family, &cfg.a_grid, &cfg.tol)?;
    let mut curves = Table::new(
        "curves",
        &[
            "a",
            "inf_wedge",
            "argmin_wedge",
            "one_plus_ln_a",
            "inf_restricted",
            "bound_lo",
        ],
    );
    for i in 0..wc.abscissa.len() {
        let a = wc.abscissa[i];
        let lo = wc.bound_lo.as_ref().map(|b| b[i]);
        curves.push(vec![
            a.into(),
            wc.values[i].into(),
            wc.argmin_index[i].into(),
            (1.0 + a.ln()).into(),
            rc.values[i].into(),
            lo.into(),
        ]);
        if 1.0 + a.ln() < a {
            rep.checks.push(Check::relative(
                "inf wedge equals 1 + ln a",
                at(a),
                wc.values[i],
                1.0 + a.ln(),
                CLOSED_FORM_REL,
            ));
            rep.checks.push(Check::flag(
                "inf wedge attained at n = 1",
                at(a),
                wc.argmin_index[i] == 1,
            ));
        }
        if a <= cfg.window.max as f64 {
            rep.checks.push(Check::absolute(
                "inf restricted is exactly 0",
                at(a),
                rc.values[i],
                0.0,
                0.0,
            ));
        }
    }
    rep.tables.push(curves);

    let e2 = std::f64::consts::E.powi(2);
    let at_e2 = inf_wedge_curve(&family, &GridSpec::linear(e2, e2 + 1.0, 2)?, &cfg.tol)?;
    rep.checks.push(Check::relative(
        "inf wedge at a = e^2",
        at(e2),
        at_e2.values[0],
        3.0,
        CLOSED_FORM_REL,
    ));

    let wv = verdict_for(Criterion::WUni, &wc);
    rep.checks.push(status_flag(
        "W-UNI certified",
        &wv,
        VerdictStatus::CertifiedDiverges,
    ));
    let hook = wv.evidence.hook.as_ref().map(|h| h.bound.clone());
    rep.checks.push(Check::flag(
        "W-UNI hook is min(a, 1 + ln a)",
        hook.as_ref().map_or("none".into(), BoundFn::describe),
        hook == Some(BoundFn::MinLinearLog),
    ));
    let uv = verdict_for(Criterion::Uni, &rc);
    rep.checks.push(status_flag(
        "UNI fails",
        &uv,
        VerdictStatus::CertifiedBoundedInf,
    ));
    rep.verdicts = vec![wv, uv];
    Ok(rep)
}

/// Pareto-α family with interleaved exponents: W-UNI while `β = 0`.
pub fn reproduce_example_2_2(cfg: &ExperimentConfig) -> Result<ReproductionReport> {
    need_grid_past_e(&cfg.a_grid)?;
    let mut rep = ReproductionReport::new("example-2.2");
    let grid = cfg.a_grid.values();
    let quad = cfg.tol.quadrature();

    let mut forms = Table::new(
        "closed_forms",
        &[
            "alpha",
            "a",
            "wedge_closed_form",
            "wedge_quadrature",
            "restricted_closed_form",
            "restricted_quadrature",
        ],
    );
    let rows: Vec<_> = [0.1, 0.25, 0.5, 0.9]
        .par_iter()
        .map(|&alpha| -> Result<_> {
            let spec = RvSpec::pareto_alpha(alpha)?;
            grid.iter()
                .map(|&a| {
                    Ok((
                        alpha,
                        a,
                        wedge_closed_form(&spec, a).expect("closed form exists"),
                        wedge_mean(&spec, a, quad)?.value,
                        restricted_closed_form(&spec, a).expect("closed form exists"),
                        restricted_mean(&spec, a, quad)?.value,
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    for (alpha, a, wcf, wq, rcf, rq) in rows.into_iter().flatten() {
        forms.push(vec![
            alpha.into(),
            a.into(),
            wcf.into(),
            wq.into(),
            rcf.into(),
            rq.into(),
        ]);
        let input = format!("alpha={alpha},a={a}");
        rep.checks.push(Check::relative(
            "wedge quadrature vs closed form",
            input.clone(),
            wq,
            wcf,
            CLOSED_FORM_REL,
        ));
        rep.checks.push(Check::relative(
            "restricted quadrature vs closed form",
            input,
            rq,
            rcf,
            CLOSED_FORM_REL,
        ));
    }
    rep.tables.push(forms);

    let half = RvSpec::pareto_alpha(0.5)?;
    rep.checks.push(Check::relative(
        "wedge alpha=0.5 at a=4",
        at(4.0),
        wedge_mean(&half, 4.0, quad)?.value,
        3.0,
        CLOSED_FORM_REL,
    ));

    // window doubling 2^4 .. 2^10
    let kind = FamilyKind::ParetoAlpha {
        alphas: cfg.alphas.clone(),
    };
    let sizes: Vec<u64> = (4..=10).map(|p| 1u64 << p).collect();
    let e = std::f64::consts::E;
    let mut doubling = Table::new(
        "window_doubling",
        &["window_max", "a", "inf_wedge", "one_plus_ln_a", "beta"],
    );
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut gap_at_e = Vec::new();
    let mut last = None;
    for &size in &sizes {
        let family = RvFamily::new(kind.clone(), IndexWindow::new(1, size)?)?;
        let wc = inf_wedge_curve(&family, &cfg.a_grid, &cfg.tol)?;
        let bc = beta_curve(&family, &cfg.a_grid)?;
        for i in 0..wc.abscissa.len() {
            let a = wc.abscissa[i];
            doubling.push(vec![
                size.into(),
                a.into(),
                wc.values[i].into(),
                (1.0 + a.ln()).into(),
                bc.values[i].into(),
            ]);
            let input = format!("window=1..{size},a={a}");
            rep.checks.push(Check::at_least(
                "inf wedge at least 1 + ln a",
                input.clone(),
                wc.values[i],
                1.0 + a.ln(),
                1e-9,
            ));
            if let Some((pw, pb)) = &prev {
                rep.checks.push(Check::at_least(
                    "inf wedge nonincreasing under doubling",
                    input.clone(),
                    pw[i],
                    wc.values[i],
                    0.0,
                ));
                rep.checks.push(Check::at_least(
                    "beta nonincreasing under doubling",
                    input,
                    pb[i],
                    bc.values[i],
                    0.0,
                ));
            }
        }
        let probe = inf_wedge_curve(&family, &GridSpec::linear(e, e + 1.0, 2)?, &cfg.tol)?;
        gap_at_e.push((size, probe.values[0] - 2.0));
        prev = Some((wc.values.clone(), bc.values.clone()));
        last = Some((family, wc, bc));
    }
    let mut gaps = Table::new("gap_at_e", &["window_max", "inf_wedge_minus_2"]);
    for (size, g) in &gap_at_e {
        gaps.push(vec![(*size).into(), (*g).into()]);
        rep.checks.push(Check::at_least(
            "inf wedge at a = e above 2",
            format!("window=1..{size}"),
            *g,
            0.0,
            0.0,
        ));
    }
    for w in gap_at_e.windows(2) {
        rep.checks.push(Check::flag(
            "inf wedge at a = e strictly approaches 2",
            format!("window=1..{}", w[1].0),
            w[1].1 < w[0].1,
        ));
    }
    rep.tables.push(gaps);
    rep.tables.push(doubling);

    let first_beta = beta_curve(
        &RvFamily::new(kind.clone(), IndexWindow::new(1, sizes[0])?)?,
        &cfg.a_grid,
    )?;
    let (family, wc, bc) = last.expect("at least one window");
    let top = bc.abscissa.len() - 1;
    rep.checks.push(Check::flag(
        "beta at largest a strictly decreases across doubling",
        at(bc.abscissa[top]),
        bc.values[top] < first_beta.values[top],
    ));

    // β at a = 100 once the window holds α = 1 − 1/10
    let probe = RvFamily::new(kind, IndexWindow::new(1, 18)?)?;
    let b100 = beta_curve(&probe, &GridSpec::linear(100.0, 101.0, 2)?)?;
    rep.checks.push(Check::relative(
        "beta at a=100, window 1..18",
        at(100.0),
        b100.values[0],
        1.0 - 100f64.powf(-0.1),
        1e-12,
    ));

    let wv = verdict_for(Criterion::WUni, &wc);
    rep.checks.push(status_flag(
        "W-UNI certified",
        &wv,
        VerdictStatus::CertifiedDiverges,
    ));
    let bv = verdict_for(Criterion::BetaPositive, &bc);
    rep.checks.push(Check::flag(
        "beta-positive fails",
        format!("{:?}", bv.holds),
        bv.holds == Some(false),
    ));
    let uv = verdict_for(
        Criterion::Uni,
        &inf_restricted_curve(&family, &cfg.a_grid, &cfg.tol)?,
    );
    rep.verdicts = vec![wv, uv, bv];
    Ok(rep)
}

fn harmonic(m: u64) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

/// Mixture family `p_n = 1/n`: every member NI, the family not W-UNI.
pub fn counterexample_not_wuni(cfg: &ExperimentConfig) -> Result<ReproductionReport> {
    need_grid_past_e(&cfg.a_grid)?;
    let mut rep = ReproductionReport::new("counterexample");
    let quad = cfg.tol.quadrature();
    let e = std::f64::consts::E;

    let m4 = RvSpec::bernoulli_pareto(0.25)?;
    rep.checks.push(Check::relative(
        "wedge n=4 at a=e",
        na(4, e),
        wedge_mean(&m4, e, quad)?.value,
        0.5,
        CLOSED_FORM_REL,
    ));

    let members: Vec<u64> = cfg.window.iter().collect();
    let ni: Vec<Verdict> = members
        .par_iter()
        .map(|&n| {
            ni_evidence(
                &RvSpec::bernoulli_pareto(1.0 / n as f64)?,
                &cfg.a_grid,
                cfg.m_max,
                &cfg.tol,
            )
        })
        .collect::<Result<_>>()?;
    let mut members_t = Table::new(
        "members",
        &["n", "ni_status", "tail_sum_m_max", "tail_sum_reference"],
    );
    let mut all_certified = true;
    for (&n, v) in members.iter().zip(&ni) {
        let ts = *tail_sums(&RvSpec::bernoulli_pareto(1.0 / n as f64)?, cfg.m_max)
            .last()
            .expect("m_max + 1 terms");
        let reference = (1.0 + harmonic(cfg.m_max)) / n as f64;
        members_t.push(vec![
            n.into(),
            format!("{:?}", v.status).into(),
            ts.into(),
            reference.into(),
        ]);
        if v.status != VerdictStatus::CertifiedDiverges || v.holds != Some(true) {
            all_certified = false;
            rep.checks.push(status_flag(
                "member certified NI",
                v,
                VerdictStatus::CertifiedDiverges,
            ));
        }
    }
    rep.checks.push(Check::flag(
        "every member certified NI",
        format!("window=1..{}", cfg.window.max),
        all_certified,
    ));
    rep.tables.push(members_t);

    let mut tails = Table::new("tail_sums", &["n", "m", "tail_sum", "reference"]);
    for n in [1u64, 2, 5, 10, 100] {
        let sums = tail_sums(&RvSpec::bernoulli_pareto(1.0 / n as f64)?, 1000);
        for m in [10u64, 100, 1000] {
            let reference = (1.0 + harmonic(m)) / n as f64;
            tails.push(vec![
                n.into(),
                m.into(),
                sums[m as usize].into(),
                reference.into(),
            ]);
            rep.checks.push(Check::relative(
                "tail sum (1 + H_m)/n",
                format!("n={n},m={m}"),
                sums[m as usize],
                reference,
                1e-12,
            ));
        }
    }
    rep.tables.push(tails);

    let mut shrink = Table::new(
        "window_shrink",
        &["window_max", "a", "inf_wedge", "reference"],
    );
    let probe_grid = GridSpec::linear(e, 100.0, 2)?;
    let mut prev = None;
    for size in [10u64, 100, 1000] {
        let fam = RvFamily::new(FamilyKind::HarmonicMixture, IndexWindow::new(1, size)?)?;
        let c = inf_wedge_curve(&fam, &probe_grid, &cfg.tol)?;
        for (&a, &v) in c.abscissa.iter().zip(&c.values) {
            let reference = (1.0 + a.ln()) / size as f64;
            shrink.push(vec![size.into(), a.into(), v.into(), reference.into()]);
            rep.checks.push(Check::relative(
                "inf wedge (1 + ln a)/N",
                format!("window=1..{size},a={a}"),
                v,
                reference,
                CLOSED_FORM_REL,
            ));
        }
        if let Some(p) = prev {
            rep.checks.push(Check::flag(
                "inf wedge shrinks with the window",
                format!("window=1..{size}"),
                c.values[1] < p,
            ));
        }
        prev = Some(c.values[1]);
    }
    rep.tables.push(shrink);

    let family = RvFamily::new(FamilyKind::HarmonicMixture, cfg.window)?;
    let wv = verdict_for(
        Criterion::WUni,
        &inf_wedge_curve(&family, &cfg.a_grid, &cfg.tol)?,
    );
    rep.checks.push(status_flag(
        "W-UNI bounded",
        &wv,
        VerdictStatus::CertifiedBoundedInf,
    ));
    let tv = verdict_for(Criterion::WStarUni, &inf_tailsum_curve(&family, cfg.m_max)?);
    rep.verdicts = vec![wv, tv];
    Ok(rep)
}

/// Escape in probability of the scaled Pareto family alongside its W-UNI verdict.
pub fn remark_4_3_probe(cfg: &ExperimentConfig) -> Result<ReproductionReport> {
    need_grid_past_e(&cfg.a_grid)?;
    let mut rep = ReproductionReport::new("remark-4.3");
    let family = RvFamily::new(FamilyKind::ScaledPareto, cfg.window)?;
    let esc = escape_probability_curve(&family, &cfg.k_grid)?;

    let shown: Vec<u64> = [1u64, 2, 5, 10, 100, 1000]
        .into_iter()
        .filter(|n| *n >= cfg.window.min && *n <= cfg.window.max)
        .collect();
    let mut cols = vec!["K".to_string()];
    cols.extend(shown.iter().map(|n| format!("S_{n}")));
    cols.push("first_escaped".into());
    cols.push("first_certain".into());
    let col_refs: Vec<&str> = cols.iter().map(String::as_str).collect();
    let mut table = Table::new("escape", &col_refs);
    for (i, &k) in esc.levels.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(
            shown
                .iter()
                .map(|&n| Cell::from(esc.survival[i][(n - cfg.window.min) as usize])),
        );
        row.push(esc.first_escaped[i].into());
        row.push(esc.first_certain[i].into());
        table.push(row);
        // S_n(K) = 1 iff n ≥ K
        let expect = (k.ceil() as u64).max(cfg.window.min);
        if expect <= cfg.window.max {
            rep.checks.push(Check::flag(
                "smallest n with S_n(K) = 1 is ceil(K)",
                format!("K={k}"),
                esc.first_certain[i] == Some(expect),
            ));
        }
    }
    rep.tables.push(table);

    let s5 = escape_probability_curve(&family, &GridSpec::linear(5.0, 8.0, 2)?)?;
    rep.checks.push(Check::flag(
        "smallest n with S_n(5) = 1",
        "K=5".into(),
        s5.first_certain[0] == Some(5),
    ));
    let s2 = RvSpec::scaled_pareto(2)?.survival(8.0);
    rep.checks
        .push(Check::relative("S_2(8)", "n=2,K=8".into(), s2, 0.25, 0.0));

    let wv = verdict_for(
        Criterion::WUni,
        &inf_wedge_curve(&family, &cfg.a_grid, &cfg.tol)?,
    );
    rep.checks.push(status_flag(
        "W-UNI still certified",
        &wv,
        VerdictStatus::CertifiedDiverges,
    ));
    rep.verdicts = vec![wv];
    Ok(rep)
}

/// Runs one experiment by its public name.
pub fn run_named(name: &str, cfg: &ExperimentConfig) -> Option<Result<ReproductionReport>> {
    Some(match name {
        "example-2.1" => reproduce_example_2_1(cfg),
        "example-2.2" => reproduce_example_2_2(cfg),
        "counterexample" => counterexample_not_wuni(cfg),
        "remark-4.3" => remark_4_3_probe(cfg),
        _ => return None,
    })
}

/// Every experiment, in [`EXPERIMENT_NAMES`] order.
pub fn run_all(cfg: &ExperimentConfig) -> Result<Vec<ReproductionReport>> {
    EXPERIMENT_NAMES
        .par_iter()
        .map(|n| run_named(n, cfg).expect("known name"))
        .collect()
}
