//! Compactness of level sets and solution sets, 𝕂ℕ- and 𝕂-inf-compactness,
//! and the uniform level-set bound around a point.

use serde::{Deserialize, Serialize};

use crate::numeric::{ExtendedReal, Real};
use crate::problem::{sample_grid, Parametric};
use crate::sets::IntervalSet;

use super::limits::{escapes, far_member, stray_point};
use super::maps::{stray_witness, tail_sets};
use super::pointwise::{check_cost_lsc_on_graph, set_samples};
use super::sequences::tail_range;
use super::{CheckError, Claim, Ctx, SetSubject, Verdict, Witness, WitnessKind};

fn pow2(n: i32) -> Real {
    Real::exact_from_f64(2f64.powi(n)).expect("finite power of two")
}

/// `y_n ∈ M(x_n)` running off to infinity; margin `|y_last| - |y_first|`
/// over the tail.
pub(crate) fn escape_witness<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    member_of: &SetSubject,
    scheme: &str,
    x: &Real,
    xs: &[Real],
) -> Result<Option<Witness>, CheckError> {
    let mut x_seq = Vec::new();
    let mut y_seq = Vec::new();
    for (n, xn) in xs.iter().enumerate() {
        let s = ctx.set(member_of, xn)?;
        if let Some(y) = far_member(&s, n) {
            x_seq.push(xn.clone());
            y_seq.push(y);
        }
    }
    let tail = tail_range(y_seq.len());
    if tail.len() < 2 {
        return Ok(None);
    }
    let a: Vec<f64> = y_seq[tail.clone()].iter().map(|y| y.to_f64().abs()).collect();
    let (first, last) = (a[0], a[a.len() - 1]);
    if !(a.windows(2).all(|p| p[1] >= p[0]) && last >= 100.0 * (1.0 + first)) {
        return Ok(None);
    }
    Ok(Some(Witness {
        kind: WitnessKind::EscapingSequence,
        scheme: scheme.to_string(),
        truncation: ctx.truncation(),
        claim: Claim::Escape {
            member_of: member_of.clone(),
            x: x.clone(),
        },
        limit_claim: format!("y_n in the sets along x_n -> {x} grows from {first:.6e} to {last:.6e} without a limit point"),
        x_seq,
        y_seq: Some(y_seq),
        violation_margin: last - first,
    }))
}

fn constant_scheme<P: Parametric + ?Sized>(ctx: &Ctx<'_, P>, x: &Real) -> (String, Vec<Real>) {
    let depth = ctx.plan.sequences.depth;
    (
        format!("constant:r={}:d0=0e0:n={depth}", ctx.plan.sequences.ratio),
        vec![x.clone(); depth as usize],
    )
}

/// A noncompact set attached to the single point `x`: escape if unbounded,
/// stray at a missing boundary point otherwise.
fn noncompact_witness<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    subject: &SetSubject,
    x: &Real,
    s: &IntervalSet,
) -> Result<Option<Witness>, CheckError> {
    let (id, xs) = constant_scheme(ctx, x);
    if !s.is_bounded() {
        return escape_witness(ctx, subject, &id, x, &xs);
    }
    if !s.is_closed() {
        if let Some(c) = stray_point(std::slice::from_ref(s), s, ctx.plan.tol_check) {
            return Ok(Some(stray_witness(ctx, subject, subject, &id, x, &xs, &c, s)?));
        }
    }
    Ok(None)
}

/// Every level set `{y ∈ Φ(x) : u(x,y) ≤ λ}`, `λ ∈ lambdas`, is compact or
/// empty.
pub fn check_inf_compact<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    lambdas: &[Real],
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    for lambda in lambdas {
        let subject = SetSubject::Level { lambda: lambda.clone() };
        let s = ctx.set(&subject, x)?;
        if s.is_compact() {
            continue;
        }
        if let Some(w) = noncompact_witness(ctx, &subject, x, &s)? {
            let note = format!("level set at {lambda} is {s}");
            return Ok(Verdict::fails(w, ctx.evaluations() - start).with_note(note));
        }
        return Ok(Verdict::unknown(format!("level set at {lambda} is {s}"), ctx.evaluations() - start));
    }
    Ok(Verdict::holds(0.0, ctx.evaluations() - start))
}

/// `F(x)` is a nonempty compact set; unknown when it is empty.
pub fn check_set_compact<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    subject: &SetSubject,
    x: &Real,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let s = ctx.set(subject, x)?;
    if s.is_empty() {
        return Ok(Verdict::unknown("empty set", ctx.evaluations() - start));
    }
    if s.is_compact() {
        return Ok(Verdict::holds(0.0, ctx.evaluations() - start));
    }
    match noncompact_witness(ctx, subject, x, &s)? {
        Some(w) => Ok(Verdict::fails(w, ctx.evaluations() - start)),
        None => Ok(Verdict::unknown(format!("{s} is not compact"), ctx.evaluations() - start)),
    }
}

/// A member of `s` with small cost: the midpoint of the cheapest piece, or a
/// far point of an unbounded piece.
fn inner_member<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    s: &IntervalSet,
    n: usize,
) -> Result<Option<Real>, CheckError> {
    let mut best: Option<(ExtendedReal, Real)> = None;
    for piece in s.pieces() {
        let one = IntervalSet::from_interval(Some(piece.clone()));
        let y = match (piece.lo().as_real(), piece.hi().as_real()) {
            (Some(a), Some(b)) => a.midpoint(b),
            _ => match far_member(&one, n) {
                Some(y) => y,
                None => continue,
            },
        };
        let c = ctx.cost(x, &y)?;
        if best.as_ref().map_or(true, |(b, _)| c < *b) {
            best = Some((c, y));
        }
    }
    Ok(best.map(|(_, y)| y))
}

/// `Φ*(x)` is a nonempty compact set.
pub fn check_argmin_compact<P: Parametric + ?Sized>(ctx: &Ctx<'_, P>, x: &Real) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let min = ctx.value(x)?;
    let v = match &min.value {
        ExtendedReal::Finite(v) => v.clone(),
        ExtendedReal::PosInf => return Ok(Verdict::unknown("Phi(x) is empty", 0)),
        ExtendedReal::NegInf => return Ok(Verdict::unknown("the value is -inf", 0)),
    };
    if min.argmin.is_empty() {
        // minimizing sequence y_n in the level sets at v + 2^-n
        let depth = ctx.plan.sequences.depth as usize;
        let mut ys = Vec::new();
        for n in 1..=depth {
            let lambda = v.add(&pow2(-(n as i32)));
            let s = ctx.set(&SetSubject::Level { lambda }, x)?;
            if let Some(y) = inner_member(ctx, x, &s, n)? {
                ys.push(y);
            }
        }
        let tail = tail_range(ys.len());
        let mut margin = f64::INFINITY;
        for y in &ys[tail] {
            let g = ctx.cost(x, y)?.sub(&min.value).map(|g| g.to_f64()).unwrap_or(f64::INFINITY);
            margin = margin.min(g);
        }
        let used = ctx.evaluations() - start;
        if ys.len() < 2 {
            return Ok(Verdict::unknown("no minimizing sequence found", used));
        }
        return Ok(Verdict::fails(
            Witness {
                kind: WitnessKind::ViolatingSequence,
                scheme: constant_scheme(ctx, x).0,
                truncation: ctx.truncation(),
                claim: Claim::Unattained { x: x.clone() },
                limit_claim: format!("u({x}, y_n) decreases to v = {v} which no point of Phi({x}) attains"),
                x_seq: vec![x.clone(); ys.len()],
                y_seq: Some(ys),
                violation_margin: margin,
            },
            used,
        ));
    }
    if min.argmin.is_compact() {
        return Ok(Verdict::holds(0.0, ctx.evaluations() - start));
    }
    match noncompact_witness(ctx, &SetSubject::ArgMin, x, &min.argmin)? {
        Some(w) => Ok(Verdict::fails(w, ctx.evaluations() - start)),
        None => Ok(Verdict::unknown(
            format!("solution set {} is not compact", min.argmin),
            ctx.evaluations() - start,
        )),
    }
}

/// `λ` grid above `v(x)`: escaping or stray level-set sequences at a lower
/// `λ` persist at every higher one, so a sparse grid suffices.
fn lambda_grid(base: &ExtendedReal) -> Vec<Real> {
    let b = match base {
        ExtendedReal::Finite(v) => v.clone(),
        _ => Real::zero(),
    };
    vec![b.add(&pow2(-4)), b.add(&Real::one()), b.add(&pow2(4))]
}

/// Level-set sequences along `x_n → x̄` either escape or accumulate outside
/// `target`.
#[allow(clippy::too_many_arguments)]
fn level_limits<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    window: &IntervalSet,
    lambdas: &[Real],
    target_subject: &SetSubject,
    target_of: &dyn Fn(&Real) -> Result<IntervalSet, CheckError>,
) -> Result<Option<Witness>, CheckError> {
    let tol = ctx.plan.tol_check;
    for lambda in lambdas {
        let subject = SetSubject::Level { lambda: lambda.clone() };
        let target = target_of(lambda)?;
        for scheme in ctx.plan.sequences.schemes(x, window, ctx.tagged(), true) {
            let Some(xs) = scheme.generate(x, window) else {
                continue;
            };
            let sets = tail_sets(ctx, &subject, &xs)?;
            if sets.is_empty() {
                continue;
            }
            if escapes(&sets) {
                if let Some(w) = escape_witness(ctx, &subject, &scheme.id(), x, &xs)? {
                    return Ok(Some(w));
                }
            }
            if let Some(c) = stray_point(&sets, &target, tol) {
                let target_subject = match target_subject {
                    SetSubject::Level { .. } => subject.clone(),
                    other => other.clone(),
                };
                return Ok(Some(stray_witness(ctx, &subject, &target_subject, &scheme.id(), x, &xs, &c, &target)?));
            }
        }
    }
    Ok(None)
}

/// 𝕂ℕ-inf-compactness on `Gr_{x}(Φ)`: `u` lower semicontinuous on the graph
/// at `x`, and level-set sequences along `x_n → x` accumulate inside `Φ(x)`.
pub fn check_kn_inf_compact_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let phi = ctx.phi(x)?;
    let min = ctx.value(x)?;
    let mut ys = set_samples(&phi, ctx.plan.set_grid);
    ys.extend(min.argmin.finite_endpoints());
    ys.sort();
    ys.dedup();
    let lsc = check_cost_lsc_on_graph(ctx, x, &ys)?;
    if lsc.is(super::Status::Fails) {
        return Ok(Verdict::all([lsc]).with_note("u is not lower semicontinuous on the graph"));
    }
    let lambdas = lambda_grid(&min.value);
    let limits = level_limits(ctx, x, ctx.window(), &lambdas, &SetSubject::Phi, &|_| Ok(phi.clone()))?;
    let used = ctx.evaluations() - start;
    match limits {
        Some(w) => Ok(Verdict::fails(w, used)),
        None => {
            let rest = used.saturating_sub(lsc.budget_used);
            Ok(Verdict::all([lsc, Verdict::holds(0.0, rest)]))
        }
    }
}

/// 𝕂-inf-compactness on `Gr_K(Φ)`: the graph-restricted level sets over
/// the compact `K` are bounded and closed.
pub fn check_k_inf_compact<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    k: &IntervalSet,
) -> Result<Verdict, CheckError> {
    if !k.is_nonempty_compact() {
        return Err(CheckError::Precondition(format!("K = {k} is not a nonempty compact set")));
    }
    if !k.is_subset(ctx.window()) {
        return Err(CheckError::Precondition(format!("K = {k} is not inside the parameter domain")));
    }
    let start = ctx.evaluations();
    let mut points = sample_grid(k, ctx.plan.window_grid);
    points.extend(k.finite_endpoints());
    points.retain(|p| k.member(p));
    points.sort();
    points.dedup();
    let mut base = ExtendedReal::NegInf;
    for p in &points {
        let v = ctx.value(p)?.value;
        if v.is_finite() && v > base {
            base = v;
        }
    }
    let lambdas = lambda_grid(&base);
    for p in &points {
        let target = |lambda: &Real| ctx.set(&SetSubject::Level { lambda: lambda.clone() }, p);
        let found = level_limits(ctx, p, k, &lambdas, &SetSubject::Level { lambda: Real::zero() }, &target)?;
        if let Some(w) = found {
            return Ok(Verdict::fails(w, ctx.evaluations() - start));
        }
    }
    Ok(Verdict::holds(0.0, ctx.evaluations() - start))
}

/// The neighbourhood radius and compact set certifying the uniform bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionIii {
    pub delta: Real,
    pub c: IntervalSet,
}

/// `D(λ)` at every `x*` near `x` is nonempty and inside one compact set `C`.
/// Radii `2^-k` are tried in turn; `C` is the hull of the sampled level sets.
pub fn check_condition_iii<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    lambda: &Real,
) -> Result<(Verdict, Option<ConditionIii>), CheckError> {
    let start = ctx.evaluations();
    let subject = SetSubject::Level { lambda: lambda.clone() };
    let at_x = ctx.set(&subject, x)?;
    if at_x.is_empty() {
        let (id, xs) = constant_scheme(ctx, x);
        let w = empty_level_witness(ctx, lambda, id, xs)?;
        return Ok((Verdict::fails(w, ctx.evaluations() - start), None));
    }
    for k in 1..=20 {
        let delta = pow2(-k);
        let ball = IntervalSet::closed(x.sub(&delta), x.add(&delta))
            .map_err(|e| CheckError::Precondition(e.to_string()))?
            .intersect(ctx.window());
        let mut points = sample_grid(&ball, ctx.plan.window_grid);
        points.extend(ball.finite_endpoints());
        for (_, xs) in ctx.plan.sequences.sequences(x, &ball, ctx.tagged(), false) {
            points.extend(xs);
        }
        points.push(x.clone());
        points.retain(|p| ball.member(p));
        points.sort();
        points.dedup();
        let mut union = IntervalSet::empty();
        let mut ok = true;
        for p in &points {
            let s = ctx.set(&subject, p)?;
            if s.is_empty() || !s.is_bounded() {
                ok = false;
                break;
            }
            union = union.union(&s);
        }
        if ok {
            let c = union.closure().hull();
            let used = ctx.evaluations() - start;
            return Ok((Verdict::holds(0.0, used), Some(ConditionIii { delta, c })));
        }
    }
    // no radius worked: look for a sequence with empty or escaping level sets
    for (id, xs) in ctx.plan.sequences.sequences(x, ctx.window(), ctx.tagged(), false) {
        let mut empty = true;
        for i in tail_range(xs.len()) {
            if !ctx.set(&subject, &xs[i])?.is_empty() {
                empty = false;
                break;
            }
        }
        if empty {
            let w = empty_level_witness(ctx, lambda, id, xs)?;
            return Ok((Verdict::fails(w, ctx.evaluations() - start), None));
        }
        let sets = tail_sets(ctx, &subject, &xs)?;
        if escapes(&sets) {
            if let Some(w) = escape_witness(ctx, &subject, &id, x, &xs)? {
                return Ok((Verdict::fails(w, ctx.evaluations() - start), None));
            }
        }
    }
    if !at_x.is_bounded() {
        let (id, xs) = constant_scheme(ctx, x);
        if let Some(w) = escape_witness(ctx, &subject, &id, x, &xs)? {
            return Ok((Verdict::fails(w, ctx.evaluations() - start), None));
        }
    }
    Ok((
        Verdict::unknown("no radius with uniformly bounded nonempty level sets", ctx.evaluations() - start),
        None,
    ))
}

/// `D(λ)` empty along `x_n`; margin `min (v(x_n) - λ)` over the tail.
fn empty_level_witness<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    lambda: &Real,
    id: String,
    xs: Vec<Real>,
) -> Result<Witness, CheckError> {
    let mut margin = f64::INFINITY;
    for i in tail_range(xs.len()) {
        margin = margin.min(super::value::value_gap(&ctx.value(&xs[i])?.value, Some(lambda)));
    }
    Ok(Witness {
        kind: WitnessKind::ViolatingSequence,
        scheme: id,
        truncation: ctx.truncation(),
        claim: Claim::EmptyLevel { lambda: lambda.clone() },
        limit_claim: format!("v(x_n) stays above {lambda}, so the level sets are empty"),
        x_seq: xs,
        y_seq: None,
        violation_margin: margin,
    })
}
