#![allow(dead_code)]

use nonint_core::{Interpolation, RvSpec};

/// Laws exercised by the corpus-wide checks.
pub fn corpus() -> Vec<(String, RvSpec)> {
    let mut out: Vec<(String, RvSpec)> = Vec::new();
    for n in [1u64, 2, 5, 10, 100] {
        out.push((
            format!("scaled_pareto({n})"),
            RvSpec::scaled_pareto(n).unwrap(),
        ));
    }
    for a in [0.1, 0.25, 0.5, 0.9] {
        out.push((
            format!("pareto_alpha({a})"),
            RvSpec::pareto_alpha(a).unwrap(),
        ));
    }
    for p in [1.0, 0.5, 0.1] {
        out.push((
            format!("bernoulli_pareto({p})"),
            RvSpec::bernoulli_pareto(p).unwrap(),
        ));
    }
    out.push(("degenerate(5)".into(), RvSpec::degenerate(5.0).unwrap()));
    out.push(("degenerate(0.5)".into(), RvSpec::degenerate(0.5).unwrap()));
    out.push((
        "empirical".into(),
        RvSpec::empirical(vec![0.5, 1.0, 1.0, 2.5, 7.25, 12.0, 40.0]).unwrap(),
    ));
    out.push((
        "tabulated(step)".into(),
        RvSpec::tabulated(
            vec![(1.0, 0.8), (2.0, 0.5), (4.0, 0.25), (8.0, 0.1), (16.0, 0.0)],
            Interpolation::Step,
        )
        .unwrap(),
    ));
    out.push((
        "tabulated(linear)".into(),
        RvSpec::tabulated(
            vec![
                (0.0, 1.0),
                (0.5, 0.9),
                (3.0, 0.4),
                (10.0, 0.05),
                (30.0, 0.0),
            ],
            Interpolation::Linear,
        )
        .unwrap(),
    ));
    out.push((
        "scaled(pareto_alpha(0.5), 2.5)".into(),
        RvSpec::scaled(RvSpec::pareto_alpha(0.5).unwrap(), 2.5).unwrap(),
    ));
    out
}

/// Corpus plus a defective table whose survival floor leaves mass at infinity.
pub fn corpus_with_defective() -> Vec<(String, RvSpec)> {
    let mut c = corpus();
    c.push((
        "tabulated(floor 0.1)".into(),
        RvSpec::tabulated(
            vec![(0.5, 0.9), (3.0, 0.4), (10.0, 0.1)],
            Interpolation::Linear,
        )
        .unwrap(),
    ));
    c
}

/// `H_m` by direct summation.
pub fn harmonic(m: u64) -> f64 {
    (1..=m).map(|k| 1.0 / k as f64).sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}
