//! Lower and upper semicontinuity of scalar functions at a point.

use rand::{Rng, SeedableRng};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand_chacha::ChaCha8Rng;

use crate::numeric::{ExtendedReal, Real};
use crate::problem::Parametric;
use crate::sets::IntervalSet;

use super::sequences::{simple, tail_range};
use super::{CheckError, Claim, Ctx, Status, Subject, Verdict, Witness, WitnessKind};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Semicontinuity {
    Lower,
    Upper,
}

/// How far `g` sits on the wrong side of `at`: `at − g` for lower, `g − at`
/// for upper semicontinuity. Equal infinities count as no violation.
pub(crate) fn deficit(sense: Semicontinuity, at: &ExtendedReal, g: &ExtendedReal) -> f64 {
    let (hi, lo) = match sense {
        Semicontinuity::Lower => (at, g),
        Semicontinuity::Upper => (g, at),
    };
    match (hi, lo) {
        (ExtendedReal::PosInf, ExtendedReal::PosInf) | (ExtendedReal::NegInf, ExtendedReal::NegInf) => 0.0,
        (ExtendedReal::PosInf, _) | (_, ExtendedReal::NegInf) => f64::INFINITY,
        (ExtendedReal::NegInf, _) | (_, ExtendedReal::PosInf) => f64::NEG_INFINITY,
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => a.sub(b).to_f64(),
    }
}

/// A sequence converging to the test point with the function sampled on
/// its tail.
pub(crate) struct Sampled {
    pub id: String,
    pub xs: Vec<Real>,
    pub ys: Option<Vec<Real>>,
    pub tail: Vec<ExtendedReal>,
}

/// Margin of a tail: the smallest deficit when every deficit exceeds `tol`,
/// and whether the tail is mixed.
fn tail_margin(sense: Semicontinuity, at: &ExtendedReal, tail: &[ExtendedReal], tol: f64) -> (Option<f64>, bool, f64) {
    let d: Vec<f64> = tail.iter().map(|g| deficit(sense, at, g)).collect();
    let worst = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let least = d.iter().cloned().fold(f64::INFINITY, f64::min);
    if !d.is_empty() && least > tol {
        (Some(least), false, worst)
    } else {
        (None, worst > tol, worst)
    }
}

/// The margin a witness replays to.
pub(crate) fn sequence_margin(sense: Semicontinuity, at: &ExtendedReal, tail: &[ExtendedReal]) -> f64 {
    tail.iter()
        .map(|g| deficit(sense, at, g))
        .fold(f64::INFINITY, f64::min)
}

#[allow(clippy::too_many_arguments)]
pub(crate) fn judge<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    sense: Semicontinuity,
    subject: &Subject,
    x: &Real,
    y: Option<&Real>,
    at: &ExtendedReal,
    seqs: &[Sampled],
    used: u64,
) -> Verdict {
    let tol = ctx.plan.tol_check;
    let mut best: Option<(f64, &Sampled)> = None;
    let mut mixed = false;
    let mut worst = f64::NEG_INFINITY;
    for s in seqs {
        let (m, mix, w) = tail_margin(sense, at, &s.tail, tol);
        mixed |= mix;
        worst = worst.max(w);
        if let Some(m) = m {
            if best.map_or(true, |(b, _)| m > b) {
                best = Some((m, s));
            }
        }
    }
    if let Some((margin, s)) = best {
        let claim = match sense {
            Semicontinuity::Lower => Claim::Lsc {
                subject: subject.clone(),
                x: x.clone(),
                y: y.cloned(),
            },
            Semicontinuity::Upper => Claim::Usc {
                subject: subject.clone(),
                x: x.clone(),
                y: y.cloned(),
            },
        };
        let (word, side) = match sense {
            Semicontinuity::Lower => ("liminf", "below"),
            Semicontinuity::Upper => ("limsup", "above"),
        };
        let at_text = match y {
            Some(y) => format!("({x}, {y})"),
            None => format!("{x}"),
        };
        return Verdict::fails(
            Witness {
                kind: WitnessKind::ViolatingSequence,
                scheme: s.id.clone(),
                truncation: ctx.truncation(),
                claim,
                x_seq: s.xs.clone(),
                y_seq: s.ys.clone(),
                limit_claim: format!("{word} along the sequence stays {margin:.6e} {side} the value {at} at {at_text}"),
                violation_margin: margin,
            },
            used,
        );
    }
    if mixed {
        return Verdict::unknown("tail oscillates across the tolerance", used);
    }
    Verdict::holds(worst.max(0.0), used)
}

fn sample_x<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    subject: &Subject,
    id: String,
    xs: Vec<Real>,
) -> Result<Sampled, CheckError> {
    let mut tail = Vec::new();
    for i in tail_range(xs.len()) {
        tail.push(ctx.scalar(subject, &xs[i], None)?);
    }
    Ok(Sampled { id, xs, ys: None, tail })
}

/// Semicontinuity of `v` or of a function of `x` alone.
fn one_dimensional<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    sense: Semicontinuity,
    subject: &Subject,
    x: &Real,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let at = ctx.scalar(subject, x, None)?;
    let mut seqs = Vec::new();
    for (id, xs) in ctx.plan.sequences.sequences(x, ctx.window(), ctx.tagged(), false) {
        seqs.push(sample_x(ctx, subject, id, xs)?);
    }
    if seqs.is_empty() {
        return Ok(Verdict::holds(0.0, 0).with_note("isolated point of the window"));
    }
    Ok(judge(ctx, sense, subject, x, None, &at, &seqs, ctx.evaluations() - start))
}

/// `lim inf g(a_n) ≥ g(a)` along the generated sequences.
pub fn check_lsc_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    subject: &Subject,
    x: &Real,
    y: Option<&Real>,
) -> Result<Verdict, CheckError> {
    check_at(ctx, Semicontinuity::Lower, subject, x, y)
}

/// `lim sup g(a_n) ≤ g(a)` along the generated sequences.
pub fn check_usc_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    subject: &Subject,
    x: &Real,
    y: Option<&Real>,
) -> Result<Verdict, CheckError> {
    check_at(ctx, Semicontinuity::Upper, subject, x, y)
}

fn check_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    sense: Semicontinuity,
    subject: &Subject,
    x: &Real,
    y: Option<&Real>,
) -> Result<Verdict, CheckError> {
    match (subject, y) {
        (Subject::Cost { on_graph: true }, Some(y)) => {
            let (l, u) = graph_point(ctx, x, y)?;
            Ok(if sense == Semicontinuity::Lower { l } else { u })
        }
        (Subject::Cost { on_graph: false }, Some(y)) => {
            let (l, u) = joint_point(ctx, x, y, 0)?;
            Ok(if sense == Semicontinuity::Lower { l } else { u })
        }
        (Subject::Cost { .. }, None) => Err(CheckError::Precondition("cost needs a y coordinate".into())),
        _ => one_dimensional(ctx, sense, subject, x),
    }
}

fn within(a: &Real, b: &Real, tol: f64) -> bool {
    (a.to_f64() - b.to_f64()).abs() <= tol * (1.0 + b.to_f64().abs())
}

/// Parameter sequences towards `x` with `Φ(x_n)` along each.
pub(crate) struct GraphSchemes {
    schemes: Vec<(String, i8, Vec<Real>, Vec<IntervalSet>)>,
}

pub(crate) fn graph_schemes<P: Parametric + ?Sized>(ctx: &Ctx<'_, P>, x: &Real) -> Result<GraphSchemes, CheckError> {
    let mut schemes = Vec::new();
    for scheme in ctx.plan.sequences.schemes(x, ctx.window(), ctx.tagged(), true) {
        let Some(xs) = scheme.generate(x, ctx.window()) else {
            continue;
        };
        let mut phis = Vec::with_capacity(xs.len());
        for xn in &xs {
            phis.push(ctx.phi(xn)?);
        }
        schemes.push((scheme.id(), scheme.side, xs, phis));
    }
    Ok(GraphSchemes { schemes })
}

/// Graph sequences `(x_n, y_n) → (x, y)` with `y_n ∈ Φ(x_n)`: `y_n` is the
/// member of `Φ(x_n)` nearest to `y + o·ε_n` for offsets `o ∈ {−1, 0, 1}`.
fn graph_sequences<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    y: &Real,
    schemes: &GraphSchemes,
) -> Vec<(String, Vec<Real>, Vec<Real>)> {
    let plan = &ctx.plan.sequences;
    let mut out = Vec::new();
    let y_step = plan.delta0_fraction * ctx.window().sup_abs().to_f64().clamp(1.0, 1e6);
    for (id, side, xs, phis) in &schemes.schemes {
        for o in [-1i32, 0, 1] {
            if *side == 0 && o == 0 {
                continue;
            }
            let mut ys = Vec::with_capacity(xs.len());
            let mut ok = true;
            for (n, (xn, phi)) in xs.iter().zip(phis).enumerate() {
                let eps = if *side == 0 {
                    y_step * plan.ratio.powi(n as i32 + 1)
                } else {
                    xn.sub(x).to_f64().abs()
                };
                let target = y.add(&Real::exact_from_f64(f64::from(o) * eps).unwrap_or_else(|_| Real::zero()));
                match phi.nearest_member(&target, eps.max(f64::MIN_POSITIVE) / 2.0) {
                    Some(m) => ys.push(m),
                    None => {
                        ok = false;
                        break;
                    }
                }
            }
            if !ok {
                continue;
            }
            let tail = tail_range(ys.len());
            if !(within(ys.last().unwrap(), y, 1e-9) && ys[tail].iter().all(|t| within(t, y, 1e-6))) {
                continue;
            }
            out.push((format!("{id}/y-offset={o}"), xs.clone(), ys));
        }
    }
    out
}

fn sample_xy<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    id: String,
    xs: Vec<Real>,
    ys: Vec<Real>,
) -> Result<Sampled, CheckError> {
    let mut tail = Vec::new();
    for i in tail_range(xs.len()) {
        tail.push(ctx.cost(&xs[i], &ys[i])?);
    }
    Ok(Sampled {
        id,
        xs,
        ys: Some(ys),
        tail,
    })
}

/// Lower and upper semicontinuity of `u` restricted to the graph at `(x, y)`.
pub fn graph_point<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    y: &Real,
) -> Result<(Verdict, Verdict), CheckError> {
    graph_point_with(ctx, x, y, &graph_schemes(ctx, x)?)
}

fn graph_point_with<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    y: &Real,
    schemes: &GraphSchemes,
) -> Result<(Verdict, Verdict), CheckError> {
    let start = ctx.evaluations();
    let at = ctx.cost(x, y)?;
    let mut seqs = Vec::new();
    for (id, xs, ys) in graph_sequences(ctx, x, y, schemes) {
        seqs.push(sample_xy(ctx, id, xs, ys)?);
    }
    let used = ctx.evaluations() - start;
    let subject = Subject::Cost { on_graph: true };
    Ok((
        judge(ctx, Semicontinuity::Lower, &subject, x, Some(y), &at, &seqs, used),
        judge(ctx, Semicontinuity::Upper, &subject, x, Some(y), &at, &seqs, used),
    ))
}

/// Unrestricted sequences `(x_n, y_n) → (x, y)` in the product space along
/// axis, diagonal and `adversarial` random directions.
fn joint_point<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    y: &Real,
    adversarial: usize,
) -> Result<(Verdict, Verdict), CheckError> {
    let start = ctx.evaluations();
    let plan = &ctx.plan.sequences;
    let at = ctx.cost(x, y)?;
    let mut seqs = Vec::new();
    let y_step = plan.delta0_fraction * ctx.window().sup_abs().to_f64().clamp(1.0, 1e6);
    let steps = |n: u32| -> Vec<f64> { (1..=n).map(|k| plan.ratio.powi(k as i32)).collect() };
    for scheme in plan.schemes(x, ctx.window(), ctx.tagged(), true) {
        let Some(xs) = scheme.generate(x, ctx.window()) else {
            continue;
        };
        for o in [-1i32, 0, 1] {
            if scheme.side == 0 && o == 0 {
                continue;
            }
            let ys: Vec<Real> = steps(scheme.depth)
                .iter()
                .map(|r| y.add(&simple(f64::from(o) * y_step * r).unwrap_or_else(Real::zero)))
                .collect();
            seqs.push(sample_xy(ctx, format!("{}/y-offset={o}", scheme.id()), xs.clone(), ys)?);
        }
    }
    if adversarial > 0 {
        let mut hasher = std::collections::hash_map::DefaultHasher::new();
        std::hash::Hash::hash(&(x.to_string(), y.to_string()), &mut hasher);
        let mut rng = ChaCha8Rng::seed_from_u64(plan.seed ^ std::hash::Hasher::finish(&hasher));
        let d0 = plan.delta0_fraction * ctx.window().sup_abs().to_f64().clamp(1.0, 1e6);
        let (Some(d0), Some(ratio)) = (simple(d0), simple(plan.ratio)) else {
            return Err(CheckError::Precondition("sequence parameters are not finite".into()));
        };
        for _ in 0..adversarial {
            let theta: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            // direction rounded to multiples of 1/64 to keep the terms small rationals
            let dir = |t: f64| Real::from_rational(BigRational::new(BigInt::from((t * 64.0).round() as i64), BigInt::from(64)));
            let (mut dx, mut dy) = (dir(theta.cos()).mul(&d0), dir(theta.sin()).mul(&d0));
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for _ in 0..plan.depth {
                dx = dx.mul(&ratio);
                dy = dy.mul(&ratio);
                xs.push(x.add(&dx));
                ys.push(y.add(&dy));
            }
            if xs.len() == plan.depth as usize && xs.iter().all(|t| ctx.window().member(t)) {
                seqs.push(sample_xy(ctx, format!("adversarial:theta={theta:.6}"), xs, ys)?);
            }
        }
    }
    let used = ctx.evaluations() - start;
    let subject = Subject::Cost { on_graph: false };
    Ok((
        judge(ctx, Semicontinuity::Lower, &subject, x, Some(y), &at, &seqs, used),
        judge(ctx, Semicontinuity::Upper, &subject, x, Some(y), &at, &seqs, used),
    ))
}

/// Sample points of a set: finite endpoints plus an exact grid; unbounded
/// pieces contribute a stretch next to their finite end.
pub(crate) fn set_samples(s: &IntervalSet, n: usize) -> Vec<Real> {
    let mut out = crate::problem::sample_grid(s, n);
    out.retain(|p| s.member(p));
    out.sort();
    out.dedup();
    out
}

/// `u` restricted to the graph is lower (upper) semicontinuous at every
/// sampled `(x, y)`, `y ∈ ys`.
pub fn check_cost_lsc_on_graph<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    ys: &[Real],
) -> Result<Verdict, CheckError> {
    let schemes = graph_schemes(ctx, x)?;
    let mut parts = Vec::new();
    for y in ys {
        let v = graph_point_with(ctx, x, y, &schemes)?.0;
        let stop = v.is(Status::Fails);
        parts.push(v);
        if stop {
            break;
        }
    }
    Ok(Verdict::all(parts))
}

pub fn check_cost_usc_on_graph<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    x: &Real,
    ys: &[Real],
) -> Result<Verdict, CheckError> {
    let schemes = graph_schemes(ctx, x)?;
    let mut parts = Vec::new();
    for y in ys {
        let v = graph_point_with(ctx, x, y, &schemes)?.1;
        let stop = v.is(Status::Fails);
        parts.push(v);
        if stop {
            break;
        }
    }
    Ok(Verdict::all(parts))
}

/// Lower and upper semicontinuity of `u` on the product space, tested at
/// graph points over `xs` along unrestricted sequences.
pub fn check_joint_continuity<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    xs: &[Real],
) -> Result<(Verdict, Verdict), CheckError> {
    let mut points = Vec::new();
    for x in xs {
        let phi = ctx.phi(x)?;
        let mut ys = set_samples(&phi, ctx.plan.set_grid.min(9));
        if let Ok(m) = ctx.value(x) {
            ys.extend(m.argmin.finite_endpoints());
        }
        ys.sort();
        ys.dedup();
        for y in ys {
            points.push((x.clone(), y));
        }
    }
    let adversarial = (ctx.plan.sequences.adversarial_budget as usize / (super::TAIL * points.len().max(1))).min(8);
    let mut lower = Vec::new();
    let mut upper = Vec::new();
    for (x, y) in &points {
        let (l, u) = joint_point(ctx, x, y, adversarial)?;
        let done = l.is(Status::Fails) && u.is(Status::Fails);
        if !lower.iter().any(|v: &Verdict| v.is(Status::Fails)) {
            lower.push(l);
        }
        if !upper.iter().any(|v: &Verdict| v.is(Status::Fails)) {
            upper.push(u);
        }
        if done {
            break;
        }
    }
    Ok((Verdict::all(lower), Verdict::all(upper)))
}
