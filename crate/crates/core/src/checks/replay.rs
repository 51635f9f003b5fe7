//! Re-verification of a witness from its stored sequences alone.

use crate::minimizer::truncate;
use crate::numeric::{ExtendedReal, Real};
use crate::problem::Parametric;
use crate::sets::{dist, excess, gap};

use super::limits::stray_margin;
use super::pointwise::{sequence_margin, Semicontinuity};
use super::value::{none_below, value_gap};
use super::sequences::tail_range;
use super::{CheckError, CheckPlan, Claim, Ctx, SetSubject, Subject, Truncation, Witness};

const MARGIN_TOL: f64 = 1e-12;

fn bad(msg: impl Into<String>) -> CheckError {
    CheckError::Replay(msg.into())
}

fn ext(e: &ExtendedReal) -> f64 {
    match e {
        ExtendedReal::PosInf => f64::INFINITY,
        ExtendedReal::NegInf => f64::NEG_INFINITY,
        ExtendedReal::Finite(r) => r.to_f64(),
    }
}

fn near(a: &Real, b: &Real, tol: f64) -> bool {
    a.sub(b).to_f64().abs() <= tol * (1.0 + b.to_f64().abs())
}

fn same_margin(a: f64, b: f64) -> bool {
    if a.is_infinite() || b.is_infinite() {
        return a == b;
    }
    let (a, b) = (super::float_text::round12(a), super::float_text::round12(b));
    (a - b).abs() <= MARGIN_TOL * a.abs().max(b.abs()).max(1.0)
}

/// Re-evaluates the witness on `p` (or on its truncation when the witness
/// was found there) and returns the recomputed violation margin. Errors when
/// the sequences no longer exhibit the claimed violation or the margin, at
/// the 12 significant digits a report keeps, moved by more than `1e-12`.
pub fn replay<P: Parametric + ?Sized>(p: &P, w: &Witness, plan: &CheckPlan) -> Result<f64, CheckError> {
    let own = p.truncation().map(|(lambda, anchor)| Truncation { lambda, anchor });
    let margin = if w.truncation == own {
        replay_on(p, w, plan)?
    } else if let (Some(t), None) = (&w.truncation, &own) {
        let tp = truncate(p, &t.lambda, &t.anchor, &plan.min)?;
        replay_on(&tp, w, plan)?
    } else {
        return Err(bad("witness belongs to a different truncation"));
    };
    if !same_margin(margin, w.violation_margin) {
        return Err(bad(format!(
            "margin {margin:e} differs from the recorded {:e}",
            w.violation_margin
        )));
    }
    Ok(margin)
}

fn replay_on<P: Parametric + ?Sized>(p: &P, w: &Witness, plan: &CheckPlan) -> Result<f64, CheckError> {
    let ctx = Ctx::new(p, plan);
    let xs = &w.x_seq;
    if xs.len() < 2 {
        return Err(bad("sequence too short"));
    }
    if let Some(ys) = &w.y_seq {
        if ys.len() != xs.len() {
            return Err(bad("x and y sequences differ in length"));
        }
    }
    let tail = tail_range(xs.len());
    let tol = plan.tol_check;
    let converges = |x: &Real| near(&xs[xs.len() - 1], x, 1e-6);
    let ys = || w.y_seq.as_ref().ok_or_else(|| bad("missing y sequence"));
    match &w.claim {
        Claim::Lsc { subject, x, y } | Claim::Usc { subject, x, y } => {
            let sense = if matches!(w.claim, Claim::Lsc { .. }) {
                Semicontinuity::Lower
            } else {
                Semicontinuity::Upper
            };
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            let at = ctx.scalar(subject, x, y.as_ref())?;
            let mut vals = Vec::new();
            for i in tail.clone() {
                let yi = match &w.y_seq {
                    Some(ys) => Some(&ys[i]),
                    None => None,
                };
                if let (Subject::Cost { on_graph: true }, Some(yi)) = (subject, yi) {
                    if !ctx.phi(&xs[i])?.member(yi) {
                        return Err(bad(format!("({}, {yi}) is off the graph", xs[i])));
                    }
                }
                vals.push(ctx.scalar(subject, &xs[i], yi)?);
            }
            if let (Some(y), Some(ys)) = (y, &w.y_seq) {
                if !near(&ys[ys.len() - 1], y, 1e-6) {
                    return Err(bad("y_n does not converge to the point"));
                }
            }
            let m = sequence_margin(sense, &at, &vals);
            if !(m > tol) {
                return Err(bad(format!("no violation: margin {m:e}")));
            }
            Ok(m)
        }
        Claim::MapLsc { map, x, y } => {
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            if !ctx.set(map, x)?.member(y) {
                return Err(bad(format!("{y} is not in F({x})")));
            }
            let mut m = f64::INFINITY;
            let mut seen = false;
            for i in tail {
                let s = ctx.set(map, &xs[i])?;
                if !s.is_empty() {
                    seen = true;
                    m = m.min(ext(&dist(y, &s)));
                }
            }
            if !seen || !(m > tol) {
                return Err(bad(format!("no violation: margin {m:e}")));
            }
            Ok(m)
        }
        Claim::MapUsc { map, x } => {
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            let fx = ctx.set(map, x)?;
            let mut m = f64::INFINITY;
            let mut seen = false;
            for i in tail {
                let s = ctx.set(map, &xs[i])?;
                if !s.is_empty() {
                    seen = true;
                    m = m.min(excess(&s, &fx).map(|e| ext(&e)).unwrap_or(0.0));
                }
            }
            if !seen || !(m > tol) {
                return Err(bad(format!("no violation: margin {m:e}")));
            }
            Ok(m)
        }
        Claim::Stray {
            member_of,
            target,
            x,
            y,
        } => {
            let ys = ys()?;
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            for (xn, yn) in xs.iter().zip(ys) {
                if !ctx.set(member_of, xn)?.member(yn) {
                    return Err(bad(format!("{yn} is not in the set at {xn}")));
                }
            }
            if !near(&ys[ys.len() - 1], y, 1e-6) {
                return Err(bad("y_n does not converge to the claimed limit"));
            }
            let t = ctx.set(target, x)?;
            if t.member(y) {
                return Err(bad(format!("{y} is in {t}")));
            }
            Ok(stray_margin(y, &t))
        }
        Claim::Escape { member_of, x } => {
            let ys = ys()?;
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            for (xn, yn) in xs.iter().zip(ys) {
                if !ctx.set(member_of, xn)?.member(yn) {
                    return Err(bad(format!("{yn} is not in the set at {xn}")));
                }
            }
            let a: Vec<f64> = ys[tail].iter().map(|y| y.to_f64().abs()).collect();
            let grows = a.windows(2).all(|p| p[1] >= p[0]) && a[a.len() - 1] >= 100.0 * (1.0 + a[0]);
            if !grows {
                return Err(bad("y_n does not escape"));
            }
            Ok(a[a.len() - 1] - a[0])
        }
        Claim::Gap { x } => {
            if !converges(x) {
                return Err(bad("x_n does not converge to the point"));
            }
            let star = ctx.value(x)?.argmin;
            if star.is_empty() {
                return Err(bad("the solution set is empty"));
            }
            let mut m = f64::INFINITY;
            for i in tail {
                m = m.min(ext(&gap(&ctx.phi(&xs[i])?, &star)));
            }
            if !(m > tol) {
                return Err(bad(format!("no violation: margin {m:e}")));
            }
            Ok(m)
        }
        Claim::EmptyLevel { lambda } => {
            let mut m = f64::INFINITY;
            for i in tail {
                if !ctx.set(&SetSubject::Level { lambda: lambda.clone() }, &xs[i])?.is_empty() {
                    return Err(bad(format!("level set at {} is not empty", xs[i])));
                }
                m = m.min(value_gap(&ctx.value(&xs[i])?.value, Some(lambda)));
            }
            Ok(m)
        }
        Claim::NoneBelow { x, lambda, strict } => {
            if !none_below(&ctx, x, lambda.as_ref(), *strict)? {
                return Err(bad("some point of Phi(x) reaches the bound"));
            }
            Ok(value_gap(&ctx.value(x)?.value, lambda.as_ref()))
        }
        Claim::Unattained { x } => {
            let ys = ys()?;
            let min = ctx.value(x)?;
            if !min.argmin.is_empty() || !min.value.is_finite() {
                return Err(bad("the infimum is attained or infinite"));
            }
            let phi = ctx.phi(x)?;
            if let Some(y) = ys.iter().find(|y| !phi.member(y)) {
                return Err(bad(format!("{y} is not in Phi({x})")));
            }
            let mut gaps = Vec::new();
            for y in &ys[tail] {
                gaps.push(ctx.cost(x, y)?.sub(&min.value).map(|g| ext(&g)).unwrap_or(f64::INFINITY));
            }
            if !(gaps[gaps.len() - 1] <= 1e-6) {
                return Err(bad("u(x, y_n) does not approach the value"));
            }
            Ok(gaps.iter().cloned().fold(f64::INFINITY, f64::min))
        }
    }
}
