//! Bounds on the value at a single point.

use crate::numeric::{ExtendedReal, Real};
use crate::problem::Parametric;

use super::{CheckError, Claim, Ctx, SetSubject, Verdict, Witness, WitnessKind};

/// `v(x) − λ`, or `+∞` when `λ` is absent and `v(x) = +∞`.
pub(crate) fn value_gap(v: &ExtendedReal, lambda: Option<&Real>) -> f64 {
    match lambda {
        None => match v {
            ExtendedReal::PosInf => f64::INFINITY,
            _ => f64::NEG_INFINITY,
        },
        Some(l) => v
            .sub(&ExtendedReal::Finite(l.clone()))
            .map(|g| g.to_f64())
            .unwrap_or(f64::INFINITY),
    }
}

/// Whether nothing in `Φ(x)` reaches below `λ`.
pub(crate) fn none_below<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    lambda: Option<&Real>,
    strict: bool,
) -> Result<bool, CheckError> {
    let v = ctx.value(x)?.value;
    Ok(match lambda {
        None => v == ExtendedReal::PosInf,
        Some(l) if strict => v >= ExtendedReal::Finite(l.clone()),
        Some(l) => ctx.set(&SetSubject::Level { lambda: l.clone() }, x)?.is_empty(),
    })
}

/// Some `y ∈ Φ(x)` has `u(x,y) < λ` (`strict`) or `u(x,y) ≤ λ`; without
/// `λ`, some `u(x,y) < +∞`.
pub fn check_value_below<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    lambda: Option<&Real>,
    strict: bool,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    if !none_below(ctx, x, lambda, strict)? {
        return Ok(Verdict::holds(0.0, ctx.evaluations() - start));
    }
    let v = ctx.value(x)?.value;
    let margin = value_gap(&v, lambda);
    let bound = match lambda {
        Some(l) => format!("{} {l}", if strict { "<" } else { "<=" }),
        None => "< +inf".to_string(),
    };
    Ok(Verdict::fails(
        Witness {
            kind: WitnessKind::ViolatingSequence,
            scheme: format!("constant:r={}:d0=0e0:n=8", ctx.plan.sequences.ratio),
            truncation: ctx.truncation(),
            claim: Claim::NoneBelow {
                x: x.clone(),
                lambda: lambda.cloned(),
                strict,
            },
            limit_claim: format!("no y in Phi({x}) has u({x}, y) {bound}; v = {v}"),
            x_seq: vec![x.clone(); 8],
            y_seq: None,
            violation_margin: margin,
        },
        ctx.evaluations() - start,
    ))
}
