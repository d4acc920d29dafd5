//! Command implementations behind the `nonint` binary.
//!
//! Exit codes: 0 ok, 1 internal failure, 2 invalid configuration,
//! 3 breakpoint budget exhausted, 4 a reproduction missed its tolerance.

pub mod config;

use std::path::{Path, PathBuf};

use nonint_core::diagnostics::{analyze, DiagnosticReport};
use nonint_core::error::ConstructionError;
use nonint_core::experiments::{run_all, run_named, ReproductionReport, EXPERIMENT_NAMES};
use nonint_core::report::{write_json, Cell, Table};
use nonint_core::vallee_poussin::{
    breakpoint_table, build_phi, default_phi_grid, find_breakpoints, phi_table, verify_phi,
    BreakpointSequence,
};
use serde::Serialize;

pub use config::{Resolved, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("tolerance failure: {0}")]
    Tolerance(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Internal(_) => 1,
            CliError::Config(_) => 2,
            CliError::Budget(_) => 3,
            CliError::Tolerance(_) => 4,
        }
    }
}

impl From<nonint_core::Error> for CliError {
    fn from(e: nonint_core::Error) -> Self {
        match e {
            nonint_core::Error::Model(m) => CliError::Config(m.to_string()),
            other => CliError::Internal(other.to_string()),
        }
    }
}

/// Loads and validates a config file; `None` gives all defaults.
pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> Result<Resolved, CliError> {
    let (cfg, dir) = match path {
        Some(p) => RunConfig::load(p)?,
        None => (RunConfig::default(), PathBuf::from(".")),
    };
    let mut r = cfg.resolve(&dir)?;
    if let Some(s) = seed {
        r.mc_seed = s;
    }
    Ok(r)
}

/// Columns of the curves CSV, in order.
pub const CURVE_COLUMNS: [&str; 7] = [
    "a",
    "inf_wedge",
    "inf_restricted",
    "beta",
    "bound_lo",
    "bound_hi",
    "argmin_index",
];

/// One row per grid level; bounds and argmin belong to the wedge curve.
pub fn curves_table(report: &DiagnosticReport) -> Table {
    let c = &report.curves;
    let mut t = Table::new("curves", &CURVE_COLUMNS);
    for i in 0..c.wedge.abscissa.len() {
        let lo = c.wedge.bound_lo.as_ref().map(|b| b[i]);
        let hi = c.wedge.bound_hi.as_ref().map(|b| b[i]);
        t.push(vec![
            c.wedge.abscissa[i].into(),
            c.wedge.values[i].into(),
            c.restricted.values[i].into(),
            c.beta.values[i].into(),
            Cell::from(lo),
            Cell::from(hi),
            c.wedge.argmin_index[i].into(),
        ]);
    }
    t
}

pub fn cmd_analyze(
    cfg: &Resolved,
    out: &Path,
    curves: Option<&Path>,
) -> Result<DiagnosticReport, CliError> {
    let report = analyze(cfg.family()?, &cfg.a_grid, cfg.m_max, &cfg.tol)?;
    write_json(out, &report)?;
    if let Some(path) = curves {
        curves_table(&report).write_csv(path)?;
    }
    Ok(report)
}

#[derive(Debug, Clone, Serialize)]
pub struct VpSummary {
    pub breakpoints: Vec<u64>,
    pub block_sums: Vec<f64>,
    pub passed: bool,
    pub verification: nonint_core::vallee_poussin::PhiVerification,
}

/// `<stem>.phi.csv` next to `out`.
pub fn sidecar(out: &Path, suffix: &str) -> PathBuf {
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.{suffix}"))
}

/// Writes the breakpoint CSV at `out`, the φ samples at `<stem>.phi.csv`
/// and the verification at `<stem>.verify.json`.
pub fn cmd_vp(cfg: &Resolved, out: &Path) -> Result<VpSummary, CliError> {
    let family = cfg.family()?;
    let search = match find_breakpoints(family, cfg.vp.count, cfg.vp.budget) {
        Ok(s) => s,
        Err(ConstructionError::BudgetExhausted {
            budget,
            block,
            partial,
            block_sums,
            stalled_sum,
        }) => {
            partial_table(&partial).write_csv(out)?;
            return Err(CliError::Budget(format!(
                "no n_{block} ≤ {budget} gives a block sum above 1 (reached {stalled_sum}); \
                 found {:?} with block sums {:?}, partial table written to {}",
                &partial.as_slice()[1..],
                block_sums,
                out.display()
            )));
        }
        Err(e) => return Err(CliError::Internal(e.to_string())),
    };
    let phi = build_phi(search.sequence.clone(), &cfg.tol);
    let verification = verify_phi(family, &phi, search.sequence.count())
        .map_err(|e| CliError::Internal(e.to_string()))?;
    breakpoint_table(&search.sequence).write_csv(out)?;
    phi_table(&phi, &default_phi_grid(&search.sequence)).write_csv(&sidecar(out, "phi.csv"))?;
    let summary = VpSummary {
        breakpoints: search.sequence.as_slice()[1..].to_vec(),
        block_sums: search.block_sums,
        passed: verification.passed,
        verification,
    };
    write_json(&sidecar(out, "verify.json"), &summary)?;
    if !summary.passed {
        return Err(CliError::Internal(format!(
            "verification failed: {:?}",
            summary.verification.first_violation
        )));
    }
    Ok(summary)
}

fn partial_table(partial: &BreakpointSequence) -> Table {
    if partial.count() == 0 {
        return Table::new("breakpoints", &["k", "n_k", "g_slope"]);
    }
    breakpoint_table(partial)
}

pub fn reproduce_names(which: &str) -> Result<Vec<&'static str>, CliError> {
    if which == "all" {
        return Ok(EXPERIMENT_NAMES.to_vec());
    }
    EXPERIMENT_NAMES
        .iter()
        .find(|n| **n == which)
        .map(|n| vec![*n])
        .ok_or_else(|| {
            CliError::Config(format!(
                "experiment: unknown name {which:?}; expected one of {}, all",
                EXPERIMENT_NAMES.join(", ")
            ))
        })
}

pub fn cmd_reproduce(
    cfg: &Resolved,
    which: &str,
    out_dir: &Path,
) -> Result<Vec<ReproductionReport>, CliError> {
    let names = reproduce_names(which)?;
    let exp = cfg.experiment_config();
    let reports = if names.len() == EXPERIMENT_NAMES.len() {
        run_all(&exp)?
    } else {
        vec![run_named(names[0], &exp).expect("known name")?]
    };
    for r in &reports {
        r.write_to(out_dir)?;
    }
    let failures: Vec<String> = reports
        .iter()
        .flat_map(|r| {
            r.failures().map(move |c| {
                format!(
                    "{}: {} [{}] |Δ| = {} > {}",
                    r.name, c.label, c.input, c.delta, c.tolerance
                )
            })
        })
        .collect();
    if !failures.is_empty() {
        let shown = failures
            .iter()
            .take(10)
            .cloned()
            .collect::<Vec<_>>()
            .join("\n  ");
        return Err(CliError::Tolerance(format!(
            "{} failing rows:\n  {shown}",
            failures.len()
        )));
    }
    Ok(reports)
}
