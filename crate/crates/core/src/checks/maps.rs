//! Semicontinuity and closedness of set-valued maps, and the neighbourhood
//! condition on minimizers.

use crate::numeric::{ExtendedReal, Real};
use crate::problem::Parametric;
use crate::sets::{dist, excess, gap, IntervalSet};

use super::limits::{approach, stray_margin, stray_point};
use super::pointwise::set_samples;
use super::sequences::tail_range;
use super::{CheckError, Claim, Ctx, SetSubject, Verdict, Witness, WitnessKind};

fn ext(e: &ExtendedReal) -> f64 {
    match e {
        ExtendedReal::PosInf => f64::INFINITY,
        ExtendedReal::NegInf => f64::NEG_INFINITY,
        ExtendedReal::Finite(r) => r.to_f64(),
    }
}

/// `F(x_n)` over the tail, dropping parameters where `F` is empty.
pub(crate) fn tail_sets<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    map: &SetSubject,
    xs: &[Real],
) -> Result<Vec<IntervalSet>, CheckError> {
    let mut out = Vec::new();
    for i in tail_range(xs.len()) {
        let s = ctx.set(map, &xs[i])?;
        if !s.is_empty() {
            out.push(s);
        }
    }
    Ok(out)
}

/// A per-sequence quantity that must tend to zero; fails when the whole tail
/// stays above the tolerance.
struct Scan {
    best: Option<(f64, String, Vec<Real>)>,
    mixed: bool,
    worst: f64,
}

impl Scan {
    fn new() -> Scan {
        Scan {
            best: None,
            mixed: false,
            worst: 0.0,
        }
    }

    fn push(&mut self, id: &str, xs: &[Real], tail: &[f64], tol: f64) {
        if tail.is_empty() {
            return;
        }
        let least = tail.iter().cloned().fold(f64::INFINITY, f64::min);
        let most = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        self.worst = self.worst.max(most);
        if least > tol {
            if self.best.as_ref().map_or(true, |(b, _, _)| least > *b) {
                self.best = Some((least, id.to_string(), xs.to_vec()));
            }
        } else if most > tol {
            self.mixed = true;
        }
    }
}

/// Lower semicontinuity of `F` at `x`: `dist(y, F(x_n)) → 0` for sampled
/// `y ∈ F(x)`. Parameters with `F(x_n) = ∅` are skipped.
pub fn check_map_lsc_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    map: &SetSubject,
    x: &Real,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let fx = ctx.set(map, x)?;
    if fx.is_empty() {
        return Ok(Verdict::unknown("empty image at the point", 0));
    }
    let ys = set_samples(&fx, ctx.plan.set_grid);
    let tol = ctx.plan.tol_check;
    let mut best: Option<(f64, String, Vec<Real>, Real)> = None;
    let mut mixed = false;
    let mut worst: f64 = 0.0;
    for (id, xs) in ctx.plan.sequences.sequences(x, ctx.window(), ctx.tagged(), false) {
        let sets = tail_sets(ctx, map, &xs)?;
        if sets.is_empty() {
            continue;
        }
        for y in &ys {
            let mut scan = Scan::new();
            let d: Vec<f64> = sets.iter().map(|s| ext(&dist(y, s))).collect();
            scan.push(&id, &xs, &d, tol);
            mixed |= scan.mixed;
            worst = worst.max(scan.worst);
            if let Some((m, id, xs)) = scan.best {
                if best.as_ref().map_or(true, |(b, ..)| m > *b) {
                    best = Some((m, id, xs, y.clone()));
                }
            }
        }
    }
    let used = ctx.evaluations() - start;
    if let Some((margin, id, xs, y)) = best {
        return Ok(Verdict::fails(
            Witness {
                kind: WitnessKind::ViolatingSequence,
                scheme: id,
                truncation: ctx.truncation(),
                claim: Claim::MapLsc {
                    map: map.clone(),
                    x: x.clone(),
                    y: y.clone(),
                },
                limit_claim: format!("dist({y}, F(x_n)) stays above {margin:.6e} while {y} is in F({x})"),
                x_seq: xs,
                y_seq: None,
                violation_margin: margin,
            },
            used,
        ));
    }
    if mixed {
        return Ok(Verdict::unknown("distance oscillates across the tolerance", used));
    }
    Ok(Verdict::holds(worst, used))
}

/// Upper semicontinuity of `F` at `x`: `excess(F(x_n), F(x)) → 0`. Only
/// faithful for compact `F(x)`; a passing scan on a noncompact image is
/// reported as unknown.
pub fn check_map_usc_at<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    map: &SetSubject,
    x: &Real,
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let fx = ctx.set(map, x)?;
    if fx.is_empty() {
        return Ok(Verdict::unknown("empty image at the point", 0));
    }
    let tol = ctx.plan.tol_check;
    let mut scan = Scan::new();
    for (id, xs) in ctx.plan.sequences.sequences(x, ctx.window(), ctx.tagged(), false) {
        let sets = tail_sets(ctx, map, &xs)?;
        let e: Vec<f64> = sets
            .iter()
            .map(|s| excess(s, &fx).map(|e| ext(&e)).unwrap_or(0.0))
            .collect();
        scan.push(&id, &xs, &e, tol);
    }
    let used = ctx.evaluations() - start;
    if let Some((margin, id, xs)) = scan.best {
        let kind = if margin.is_infinite() || margin > 1e6 {
            WitnessKind::EscapingSequence
        } else {
            WitnessKind::ViolatingSequence
        };
        return Ok(Verdict::fails(
            Witness {
                kind,
                scheme: id,
                truncation: ctx.truncation(),
                claim: Claim::MapUsc {
                    map: map.clone(),
                    x: x.clone(),
                },
                limit_claim: format!("excess(F(x_n), F({x})) stays above {margin:.6e}"),
                x_seq: xs,
                y_seq: None,
                violation_margin: margin,
            },
            used,
        ));
    }
    if scan.mixed {
        return Ok(Verdict::unknown("excess oscillates across the tolerance", used));
    }
    if !fx.is_compact() {
        return Ok(Verdict::unknown(
            format!("image {fx} is not compact; the excess test is not conclusive"),
            used,
        ));
    }
    Ok(Verdict::holds(scan.worst, used))
}

/// Closedness of the graph of `F` over the parameters `points`: graph
/// sequences converging to a point off the graph.
pub fn check_closed_graph<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    map: &SetSubject,
    points: &[Real],
) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let tol = ctx.plan.tol_check;
    for x in points {
        let fx = ctx.set(map, x)?;
        for scheme in ctx.plan.sequences.schemes(x, ctx.window(), ctx.tagged(), true) {
            let Some(xs) = scheme.generate(x, ctx.window()) else {
                continue;
            };
            let sets = if scheme.side == 0 {
                vec![fx.clone(); tail_range(xs.len()).len()]
            } else {
                tail_sets(ctx, map, &xs)?
            };
            if let Some(c) = stray_point(&sets, &fx, tol) {
                let w = stray_witness(ctx, map, map, &scheme.id(), x, &xs, &c, &fx)?;
                return Ok(Verdict::fails(w, ctx.evaluations() - start));
            }
        }
    }
    Ok(Verdict::holds(0.0, ctx.evaluations() - start))
}

/// Builds a stray-accumulation witness: `y_n ∈ M(x_n)` approaching `c`.
#[allow(clippy::too_many_arguments)]
pub(crate) fn stray_witness<P: Parametric + ?Sized>(
    ctx: &Ctx<'_, P>,
    member_of: &SetSubject,
    target_subject: &SetSubject,
    scheme: &str,
    x: &Real,
    xs: &[Real],
    c: &Real,
    target: &IntervalSet,
) -> Result<Witness, CheckError> {
    let mut x_seq = Vec::new();
    let mut y_seq = Vec::new();
    for (n, xn) in xs.iter().enumerate() {
        let s = ctx.set(member_of, xn)?;
        if let Some(y) = approach(&s, c, n) {
            x_seq.push(xn.clone());
            y_seq.push(y);
        }
    }
    let margin = stray_margin(c, target);
    Ok(Witness {
        kind: WitnessKind::StrayAccumulationPoint,
        scheme: scheme.to_string(),
        truncation: ctx.truncation(),
        claim: Claim::Stray {
            member_of: member_of.clone(),
            target: target_subject.clone(),
            x: x.clone(),
            y: c.clone(),
        },
        limit_claim: format!("(x_n, y_n) accumulates at ({x}, {c}) and {c} is not in {target}"),
        x_seq,
        y_seq: Some(y_seq),
        violation_margin: margin,
    })
}

/// Every neighbourhood of `Φ*(x)` meets `Φ(x_n)` eventually:
/// `gap(Φ(x_n), Φ*(x)) → 0`. Unknown when `Φ*(x)` is empty, and when it is
/// not compact and no gap was found.
pub fn check_condition_iv<P: Parametric + ?Sized>(ctx: &Ctx<'_, P>, x: &Real) -> Result<Verdict, CheckError> {
    let start = ctx.evaluations();
    let star = ctx.value(x)?.argmin;
    if star.is_empty() {
        return Ok(Verdict::unknown(
            "the solution set is empty; the neighbourhood condition is undefined",
            0,
        ));
    }
    let tol = ctx.plan.tol_check;
    let mut scan = Scan::new();
    for (id, xs) in ctx.plan.sequences.sequences(x, ctx.window(), ctx.tagged(), false) {
        let mut g = Vec::new();
        for i in tail_range(xs.len()) {
            g.push(ext(&gap(&ctx.phi(&xs[i])?, &star)));
        }
        scan.push(&id, &xs, &g, tol);
    }
    let used = ctx.evaluations() - start;
    if let Some((margin, id, xs)) = scan.best {
        return Ok(Verdict::fails(
            Witness {
                kind: WitnessKind::NeighborhoodGap,
                scheme: id,
                truncation: ctx.truncation(),
                claim: Claim::Gap { x: x.clone() },
                limit_claim: format!("Phi(x_n) stays {margin:.6e} away from the solution set {star}"),
                x_seq: xs,
                y_seq: None,
                violation_margin: margin,
            },
            used,
        ));
    }
    if scan.mixed {
        return Ok(Verdict::unknown("gap oscillates across the tolerance", used));
    }
    if !star.is_compact() {
        return Ok(Verdict::unknown(format!("solution set {star} is not compact"), used));
    }
    Ok(Verdict::holds(scan.worst, used))
}
