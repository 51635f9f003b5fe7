//! JSON analysis reports and CSV value curves.

use serde::Serialize;

use crate::checks::float_text;
use crate::minimizer::value;
use crate::numeric::{ExtendedReal, Real};
use crate::problem::{Parametric, Problem, ProblemError};
use crate::sets::IntervalSet;
use crate::theorems::{cross_validate, evaluate, EngineConfig, EngineError, TheoremReport, Violation};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, Serialize)]
pub struct Budget {
    /// Terms per approach sequence.
    pub sequence_depth: u32,
    /// Random probes allowed per adversarial search.
    pub adversarial: u64,
    pub evaluations: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub tool_version: String,
    pub problem: String,
    pub x: Real,
    pub value: ExtendedReal,
    #[serde(with = "float_text")]
    pub value_approx: f64,
    pub attained: bool,
    pub argmin: IntervalSet,
    pub theorems: TheoremReport,
    pub violations: Vec<Violation>,
    pub budget: Budget,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_clock_ms: Option<u64>,
}

pub fn analyze(p: &Problem, x: &Real, config: &EngineConfig) -> Result<AnalysisReport, EngineError> {
    let theorems = evaluate(p, x, config)?;
    let m = value(p, x, &config.plan.min).map_err(|e| EngineError {
        atom: crate::theorems::Atom::VFinite,
        statements: Vec::new(),
        source: e.into(),
    })?;
    Ok(AnalysisReport {
        schema_version: SCHEMA_VERSION,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        problem: p.name.clone(),
        x: x.clone(),
        value_approx: m.value.to_f64(),
        value: m.value,
        attained: m.attained,
        argmin: m.argmin,
        violations: cross_validate(&theorems),
        budget: Budget {
            sequence_depth: config.plan.sequences.depth,
            adversarial: config.plan.sequences.adversarial_budget,
            evaluations: theorems.evaluations,
        },
        theorems,
        wall_clock_ms: None,
    })
}

/// Formats a float with 12 significant digits, `+inf`/`-inf` otherwise.
pub fn number(v: f64) -> String {
    if v.is_finite() {
        let r = float_text::round12(v);
        format!("{r}")
    } else if v > 0.0 {
        "+inf".into()
    } else {
        "-inf".into()
    }
}

/// `n` evenly spaced points of `[a, b]` with `x, v(x), attained` per row.
pub fn value_curve<P: Parametric + ?Sized>(
    p: &P,
    a: &Real,
    b: &Real,
    n: usize,
    plan: &crate::minimizer::MinPlan,
) -> Result<String, ProblemError> {
    let mut out = String::from("x,v,attained\n");
    let step = b.sub(a).div(&Real::int(n as i64 - 1)).expect("n >= 2");
    for i in 0..n {
        let x = if i + 1 == n { b.clone() } else { a.add(&step.mul(&Real::int(i as i64))) };
        let m = value(p, &x, plan)?;
        out.push_str(&format!("{},{},{}\n", number(x.to_f64()), number(m.value.to_f64()), m.attained));
    }
    Ok(out)
}
