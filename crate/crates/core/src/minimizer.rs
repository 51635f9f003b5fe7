//! Value function, solution multifunction, level sets and the λ-truncation.
//!
//! Every feasible piece is scanned on a Chebyshev grid (plus exact probes at
//! closed endpoints, near open endpoints, at `y = x` and along geometric tails
//! of unbounded pieces), the best brackets are refined by golden-section
//! search, and the result is snapped to an exact point when one reproduces
//! the float optimum. Level sets are recovered by bisecting every in/out
//! transition of the scan and snapping the boundary to the simplest exact
//! number inside the bracket.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::numeric::{ExtendedReal, Real};
use crate::problem::{Parametric, ProblemError, Section};
use crate::sets::{normalize, Interval, IntervalSet};

/// Tuning knobs of the one-dimensional minimizer.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MinPlan {
    pub grid_points: usize,
    pub refine_brackets: usize,
    pub golden_tol: f64,
    pub tol_argmin: f64,
    /// Half-width of the finite stretch scanned on unbounded pieces.
    pub window_radius: f64,
    /// Number of geometric tail probes on each unbounded end.
    pub tail_depth: u32,
}

impl Default for MinPlan {
    fn default() -> Self {
        MinPlan {
            grid_points: 257,
            refine_brackets: 3,
            golden_tol: 1e-10,
            tol_argmin: 1e-9,
            window_radius: 64.0,
            tail_depth: 40,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MinResult {
    /// `v(x)`; `+∞` on an empty feasible set.
    pub value: ExtendedReal,
    pub attained: bool,
    /// `Φ*(x)`; empty when the infimum is not attained.
    pub argmin: IntervalSet,
    pub evaluations: u64,
}

type Res<T> = Result<T, ProblemError>;

#[derive(Clone, Debug)]
struct Sample {
    y: Real,
    u: ExtendedReal,
}

/// Limit of the cost at an open finite endpoint or at an infinite end,
/// approached from inside.
#[derive(Clone, Debug)]
struct EndpointLimit {
    at: ExtendedReal,
    /// For an infinite end, the start of the tail: samples beyond it belong to the approach.
    edge: Option<Real>,
    value: ExtendedReal,
    /// Every probe approaching the endpoint is strictly above the limit.
    strict: bool,
}

struct PieceScan {
    samples: Vec<Sample>,
    limits: Vec<EndpointLimit>,
}

fn pow2(k: i32) -> Real {
    let q = if k >= 0 {
        BigRational::from_integer(BigInt::one() << (k as usize))
    } else {
        BigRational::new(BigInt::one(), BigInt::one() << ((-k) as usize))
    };
    Real::from_rational(q)
}

fn exact(v: f64) -> Real {
    Real::exact_from_f64(v).unwrap_or_else(|_| Real::zero())
}

/// Radius of the finite stretch scanned on unbounded pieces around `center`.
fn radius(plan: &MinPlan, sec: &Section<'_>) -> Real {
    let mut r = plan.window_radius;
    r = r.max(4.0 * sec.cost_x().to_f64().abs());
    for e in sec.feasible.finite_endpoints() {
        r = r.max(4.0 * e.to_f64().abs());
    }
    exact(r.ceil())
}

/// Sample positions for one piece; all positions are members of the piece.
fn positions(piece: &Interval, sec: &Section<'_>, plan: &MinPlan) -> Vec<Real> {
    if piece.is_singleton() {
        return vec![piece.lo().as_real().unwrap().clone()];
    }
    let r = radius(plan, sec);
    let mut pos = Vec::new();
    // finite core [a, b] and tails
    let (a, b) = match (piece.lo().as_real(), piece.hi().as_real()) {
        (Some(a), Some(b)) => (a.clone(), b.clone()),
        (Some(a), None) => (a.clone(), a.add(&r)),
        (None, Some(b)) => (b.sub(&r), b.clone()),
        (None, None) => (r.neg(), r.clone()),
    };
    let w = b.sub(&a);
    if piece.lo().is_finite() {
        if piece.lo_closed() {
            pos.push(a.clone());
        } else {
            for k in [40, 30, 20] {
                pos.push(a.add(&w.mul(&pow2(-k))));
            }
        }
    } else {
        for k in (1..=plan.tail_depth as i32).rev() {
            pos.push(a.sub(&r.mul(&pow2(k)).sub(&r)));
        }
        pos.push(a.clone());
    }
    let n = plan.grid_points.max(3);
    let (af, wf) = (a.to_f64(), w.to_f64());
    for j in 1..n - 1 {
        let t = 0.5 - 0.5 * (std::f64::consts::PI * j as f64 / (n - 1) as f64).cos();
        pos.push(Real::Approx(af + wf * t));
    }
    if piece.hi().is_finite() {
        if piece.hi_closed() {
            pos.push(b.clone());
        } else {
            for k in [20, 30, 40] {
                pos.push(b.sub(&w.mul(&pow2(-k))));
            }
        }
    } else {
        pos.push(b.clone());
        for k in 1..=plan.tail_depth as i32 {
            pos.push(b.add(&r.mul(&pow2(k)).sub(&r)));
        }
    }
    let x = sec.cost_x();
    if piece.contains(x) {
        pos.push(x.clone());
    }
    let z = &sec.z;
    if piece.contains(z) {
        pos.push(z.clone());
    }
    pos.retain(|p| piece.contains(p));
    pos.sort();
    pos.dedup();
    pos
}

fn scan_piece(piece: &Interval, sec: &Section<'_>, plan: &MinPlan) -> Res<PieceScan> {
    let mut samples = Vec::new();
    for y in positions(piece, sec, plan) {
        let u = sec.cost(&y)?;
        samples.push(Sample { y, u });
    }
    let mut limits = Vec::new();
    if !piece.is_singleton() {
        let w = match (piece.lo().as_real(), piece.hi().as_real()) {
            (Some(a), Some(b)) => b.sub(a),
            _ => radius(plan, sec),
        };
        if let (Some(a), false) = (piece.lo().as_real(), piece.lo_closed()) {
            limits.push(endpoint_limit(sec, a, &w, 1)?);
        }
        if let (Some(b), false) = (piece.hi().as_real(), piece.hi_closed()) {
            limits.push(endpoint_limit(sec, b, &w, -1)?);
        }
        let r = radius(plan, sec);
        match (piece.lo().as_real(), piece.hi().as_real()) {
            (None, Some(b)) => limits.extend(tail_limit(sec, &b.sub(&r), &r, -1, plan)?),
            (Some(a), None) => limits.extend(tail_limit(sec, &a.add(&r), &r, 1, plan)?),
            (None, None) => {
                limits.extend(tail_limit(sec, &r.neg(), &r, -1, plan)?);
                limits.extend(tail_limit(sec, &r, &r, 1, plan)?);
            }
            _ => {}
        }
    }
    Ok(PieceScan { samples, limits })
}

/// Estimates `lim u(e + dir·h)` as `h ↓ 0` by linear extrapolation of exact
/// probes; exact for costs that are affine next to the endpoint.
fn endpoint_limit(sec: &Section<'_>, e: &Real, w: &Real, dir: i32) -> Res<EndpointLimit> {
    let step = |k: i32| {
        let h = w.mul(&pow2(-k));
        if dir > 0 {
            e.add(&h)
        } else {
            e.sub(&h)
        }
    };
    let probes: Vec<ExtendedReal> = [20, 30, 40, 41]
        .iter()
        .map(|&k| sec.cost(&step(k)))
        .collect::<Res<_>>()?;
    let extrapolate = |far: &ExtendedReal, near: &ExtendedReal| -> ExtendedReal {
        match (far, near) {
            (ExtendedReal::Finite(f), ExtendedReal::Finite(n)) => {
                ExtendedReal::Finite(n.add(n).sub(f))
            }
            _ => near.clone(),
        }
    };
    let fine = extrapolate(&probes[2], &probes[3]);
    let coarse = extrapolate(&probes[1], &probes[2]);
    let stable = match (&fine, &coarse) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) => (a.to_f64() - b.to_f64()).abs() <= 1e-9,
        (a, b) => a == b,
    };
    let value = if stable {
        fine
    } else {
        probes.iter().cloned().fold(ExtendedReal::PosInf, ExtendedReal::min)
    };
    let strict = probes.iter().all(|p| *p > value);
    Ok(EndpointLimit {
        at: ExtendedReal::Finite(e.clone()),
        edge: None,
        value,
        strict,
    })
}

/// Estimates `lim u(y)` as `y → dir·∞` from the three outermost tail probes,
/// which sit at geometrically growing distances from `edge`. Differences that
/// do not shrink mean the cost is unbounded below; shrinking ones are summed
/// as a geometric series. `None` when the far tail is not descending.
fn tail_limit(sec: &Section<'_>, edge: &Real, r: &Real, dir: i32, plan: &MinPlan) -> Res<Option<EndpointLimit>> {
    let k = plan.tail_depth as i32;
    if k < 3 {
        return Ok(None);
    }
    let mut u = Vec::new();
    for j in [k - 2, k - 1, k] {
        let off = r.mul(&pow2(j)).sub(r);
        let y = if dir > 0 { edge.add(&off) } else { edge.sub(&off) };
        match sec.cost(&y)? {
            ExtendedReal::Finite(v) => u.push(v),
            _ => return Ok(None),
        }
    }
    let (d1, d2) = (u[0].sub(&u[1]), u[1].sub(&u[2]));
    let (f1, f2) = (d1.to_f64(), d2.to_f64());
    if f1 <= 0.0 || f2 <= 0.0 {
        return Ok(None);
    }
    let at = if dir > 0 { ExtendedReal::PosInf } else { ExtendedReal::NegInf };
    let value = if f2 >= f1 {
        ExtendedReal::NegInf
    } else {
        let rho = f2 / f1;
        let rest = f2 * rho / (1.0 - rho);
        let guess = u[2].to_f64() - rest;
        let mut near = anchors(sec);
        if let Real::Exact(q) = &u[2] {
            near.push(Real::root2_multiple(q.root2_part().clone()));
        }
        let limit = snap(guess - f2, guess + f2, &near).unwrap_or(Real::Approx(guess));
        if limit >= u[2] {
            return Ok(None);
        }
        ExtendedReal::Finite(limit)
    };
    Ok(Some(EndpointLimit {
        at,
        edge: Some(edge.clone()),
        value,
        strict: true,
    }))
}

fn golden(sec: &Section<'_>, mut a: f64, mut b: f64, tol: f64) -> Res<Sample> {
    const INV_PHI: f64 = 0.618_033_988_749_895;
    let f = |t: f64| -> Res<f64> { Ok(sec.cost(&Real::Approx(t))?.to_f64()) };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    let mut iters = 0;
    while (b - a).abs() > tol && iters < 200 {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d)?;
        }
        iters += 1;
    }
    let y = Real::Approx(if fc <= fd { c } else { d });
    let u = sec.cost(&y)?;
    Ok(Sample { y, u })
}

/// Simplest rational (smallest denominator) in `[lo, hi]`.
pub fn simplest_rational(lo: &BigRational, hi: &BigRational) -> BigRational {
    fn go(lo: &BigRational, hi: &BigRational, depth: u32) -> BigRational {
        let fl = lo.floor();
        if &fl == lo {
            return fl;
        }
        if fl < hi.floor() || depth > 60 {
            return fl + BigRational::one();
        }
        let lo_f = lo - &fl;
        let hi_f = hi - &fl;
        fl + go(&hi_f.recip(), &lo_f.recip(), depth + 1).recip()
    }
    let zero = BigRational::zero();
    if lo > hi {
        return simplest_rational(hi, lo);
    }
    if lo <= &zero && hi >= &zero {
        return zero;
    }
    if hi < &zero {
        return -go(&-hi, &-lo, 0);
    }
    go(lo, hi, 0)
}

/// An exact number inside `[lo, hi]` (widened by `slack`): an anchor such as
/// `x` or a feasible endpoint when one falls inside, otherwise the simplest
/// rational, or `anchor + simplest rational` for irrational anchors when that
/// is simpler.
fn snap(lo: f64, hi: f64, anchors: &[Real]) -> Option<Real> {
    let slack = 1e-12 * (1.0 + lo.abs().max(hi.abs()));
    let (lo, hi) = (lo.min(hi) - slack, lo.max(hi) + slack);
    for a in anchors {
        let v = a.to_f64();
        if a.is_exact() && v >= lo && v <= hi {
            return Some(a.clone());
        }
    }
    let lo_q = BigRational::from_float(lo)?;
    let hi_q = BigRational::from_float(hi)?;
    let plain = simplest_rational(&lo_q, &hi_q);
    let mut best = (plain.denom().clone(), Real::from_rational(plain));
    for a in anchors {
        if let Real::Exact(s) = a {
            if s.is_rational() {
                continue;
            }
            let af = a.to_f64();
            let (Some(l), Some(h)) = (BigRational::from_float(lo - af), BigRational::from_float(hi - af)) else {
                continue;
            };
            let off = simplest_rational(&l, &h);
            if off.denom() < &best.0 {
                best = (off.denom().clone(), a.add(&Real::from_rational(off)));
            }
        }
    }
    Some(best.1)
}

fn anchors(sec: &Section<'_>) -> Vec<Real> {
    let mut a = vec![sec.cost_x().clone(), sec.z.clone()];
    a.extend(sec.feasible.finite_endpoints());
    a
}

/// `v`, `Φ*` for a fixed section.
pub fn minimize_section(sec: &Section<'_>, plan: &MinPlan) -> Res<MinResult> {
    if sec.feasible.is_empty() {
        return Ok(MinResult {
            value: ExtendedReal::PosInf,
            attained: false,
            argmin: IntervalSet::empty(),
            evaluations: sec.evaluations(),
        });
    }
    let mut members: Vec<Sample> = Vec::new();
    let mut limits: Vec<EndpointLimit> = Vec::new();
    for piece in sec.feasible.pieces() {
        let mut scan = scan_piece(piece, sec, plan)?;
        // golden refinement around the best brackets
        let mut order: Vec<usize> = (0..scan.samples.len()).collect();
        order.sort_by(|&i, &j| scan.samples[i].u.cmp(&scan.samples[j].u));
        let mut refined = Vec::new();
        for &i in order.iter().take(plan.refine_brackets) {
            if scan.samples.len() < 3 {
                break;
            }
            let lo = scan.samples[i.saturating_sub(1)].y.to_f64();
            let hi = scan.samples[(i + 1).min(scan.samples.len() - 1)].y.to_f64();
            if hi > lo {
                let s = golden(sec, lo, hi, plan.golden_tol)?;
                if piece.contains(&s.y) {
                    refined.push(s);
                }
            }
        }
        scan.samples.extend(refined);
        members.extend(scan.samples);
        limits.extend(scan.limits);
    }

    let mut best = members
        .iter()
        .min_by(|a, b| a.u.cmp(&b.u))
        .cloned()
        .expect("nonempty feasible set has samples");

    // snap the best member to an exact point reproducing its value
    if !best.y.is_exact() {
        let yf = best.y.to_f64();
        let spread = 1e-8 * (1.0 + yf.abs());
        if let Some(c) = snap(yf - spread, yf + spread, &anchors(sec)) {
            if sec.feasible.member(&c) {
                let u = sec.cost(&c)?;
                if u.to_f64() <= best.u.to_f64() + 1e-12 {
                    best = Sample { y: c, u };
                }
            }
        }
    }

    let best_limit = limits
        .iter()
        .filter(|l| l.strict)
        .min_by(|a, b| a.value.cmp(&b.value))
        .cloned();

    let (value, attained) = match best_limit {
        Some(l) if l.value < best.u => {
            // the infimum sits at an open endpoint; only an exact tie elsewhere attains it
            let gap = best.u.sub(&l.value).map(|g| g.to_f64()).unwrap_or(f64::INFINITY);
            let near = match (&l.at, &l.edge) {
                (ExtendedReal::Finite(at), _) => (best.y.to_f64() - at.to_f64()).abs() <= 1e-6 * (1.0 + at.to_f64().abs()),
                (ExtendedReal::PosInf, Some(e)) => best.y >= *e,
                (_, Some(e)) => best.y <= *e,
                _ => false,
            };
            if gap <= plan.tol_argmin && !near {
                (best.u.clone(), true)
            } else {
                (l.value, false)
            }
        }
        _ => (best.u.clone(), best.u != ExtendedReal::PosInf),
    };

    let argmin = if attained {
        argmin_set(sec, &value, &best.y, plan)?
    } else {
        IntervalSet::empty()
    };
    let attained = attained && !argmin.is_empty();
    Ok(MinResult {
        value,
        attained,
        argmin,
        evaluations: sec.evaluations(),
    })
}

/// `{y : u ≤ v}` with isolated minimizers kept as points.
fn argmin_set(sec: &Section<'_>, v: &ExtendedReal, best: &Real, plan: &MinPlan) -> Res<IntervalSet> {
    if *v == ExtendedReal::NegInf {
        return Ok(IntervalSet::empty());
    }
    let at_v = section_level_set(sec, v, plan, std::slice::from_ref(best))?;
    let loose = match v {
        ExtendedReal::Finite(r) => {
            let lam = r.add(&exact(plan.tol_argmin * (1.0 + r.to_f64().abs())));
            section_level_set(sec, &ExtendedReal::Finite(lam), plan, std::slice::from_ref(best))?
        }
        _ => at_v.clone(),
    };
    // pieces of the loose slice without any exact minimizer collapse onto the
    // best point they contain, if its value is within tolerance
    let mut pieces: Vec<Interval> = at_v.pieces().to_vec();
    for piece in loose.pieces() {
        let one = IntervalSet::from_interval(Some(piece.clone()));
        if !one.intersect(&at_v).is_empty() {
            continue;
        }
        if one.member(best) {
            pieces.push(Interval::point(best.clone()));
        }
    }
    Ok(normalize(pieces))
}

/// `{y ∈ feasible : u(y) ≤ λ}` for one section. `probes` are extra exact
/// sample points.
pub fn section_level_set(
    sec: &Section<'_>,
    lambda: &ExtendedReal,
    plan: &MinPlan,
    probes: &[Real],
) -> Res<IntervalSet> {
    let mut out = Vec::new();
    let anchors = anchors(sec);
    let float_only = sec.cost_reads_rationality();
    for piece in sec.feasible.pieces() {
        let mut pos = positions(piece, sec, plan);
        pos.extend(probes.iter().filter(|p| piece.contains(p)).cloned());
        pos.sort();
        pos.dedup();
        let mut samples = Vec::with_capacity(pos.len());
        for y in pos {
            let inside = within(sec, &y, lambda, float_only)?;
            samples.push((y, inside));
        }
        let n = samples.len();
        let mut k = 0;
        while k < n {
            if !samples[k].1 {
                k += 1;
                continue;
            }
            let start = k;
            while k + 1 < n && samples[k + 1].1 {
                k += 1;
            }
            let end = k;
            let (lo, lo_closed) = if start == 0 {
                (piece.lo().clone(), piece.lo_closed())
            } else {
                let b = boundary(sec, lambda, &samples[start].0, &samples[start - 1].0, &anchors)?;
                let closed = at_most(&sec.cost(&b)?, lambda, plan.tol_argmin);
                (ExtendedReal::Finite(b), closed)
            };
            let (hi, hi_closed) = if end == n - 1 {
                (piece.hi().clone(), piece.hi_closed())
            } else {
                let b = boundary(sec, lambda, &samples[end].0, &samples[end + 1].0, &anchors)?;
                let closed = at_most(&sec.cost(&b)?, lambda, plan.tol_argmin);
                (ExtendedReal::Finite(b), closed)
            };
            // a far-tail sample still inside means the set runs off to infinity
            let lo = if start == 0 && !piece.lo().is_finite() { ExtendedReal::NegInf } else { lo };
            let hi = if end == n - 1 && !piece.hi().is_finite() { ExtendedReal::PosInf } else { hi };
            let (lo, hi) = if lo > hi {
                let p = ExtendedReal::Finite(samples[start].0.clone());
                (p.clone(), p)
            } else {
                (lo, hi)
            };
            let singleton = lo == hi;
            if let Ok(Some(iv)) = Interval::new(
                lo.clone(),
                lo_closed || singleton,
                hi,
                hi_closed || singleton,
            ) {
                out.push(iv);
            } else if let ExtendedReal::Finite(p) = lo {
                out.push(Interval::point(p));
            }
            k += 1;
        }
    }
    Ok(normalize(out))
}

/// `u ≤ λ` up to a relative slack; used for boundary points, which may only
/// approximate an irrational crossing.
/// `u(y) <= λ`; a float argument whose value lands next to `λ` is re-evaluated
/// exactly unless the cost reads `is_rat`.
fn within(sec: &Section<'_>, y: &Real, lambda: &ExtendedReal, float_only: bool) -> Res<bool> {
    let u = sec.cost(y)?;
    if let (Real::Approx(f), false, ExtendedReal::Finite(a), ExtendedReal::Finite(l)) = (y, float_only, &u, lambda) {
        let l = l.to_f64();
        if (a.to_f64() - l).abs() <= 1e-9 * (1.0 + l.abs()) {
            return Ok(sec.cost(&exact(*f))? <= *lambda);
        }
    }
    Ok(u <= *lambda)
}

fn at_most(u: &ExtendedReal, lambda: &ExtendedReal, tol: f64) -> bool {
    match (u, lambda) {
        (ExtendedReal::Finite(a), ExtendedReal::Finite(l)) => {
            a.to_f64() <= l.to_f64() + tol * (1.0 + l.to_f64().abs())
        }
        _ => u <= lambda,
    }
}

/// Locates the in/out transition between member `inside` (u ≤ λ) and member
/// `outside` (u > λ) and snaps it to an exact point.
fn boundary(sec: &Section<'_>, lambda: &ExtendedReal, inside: &Real, outside: &Real, anchors: &[Real]) -> Res<Real> {
    let (mut a, mut b) = (inside.to_f64(), outside.to_f64());
    let float_only = sec.cost_reads_rationality();
    for _ in 0..200 {
        let m = 0.5 * (a + b);
        if m == a || m == b || (a - b).abs() <= 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if within(sec, &Real::Approx(m), lambda, float_only)? {
            a = m;
        } else {
            b = m;
        }
    }
    let (lo, hi) = (inside.min(outside).to_f64(), inside.max(outside).to_f64());
    let cand = snap(a, b, anchors).filter(|c| {
        let cf = c.to_f64();
        cf >= lo && cf <= hi
    });
    Ok(match cand {
        Some(c) => c,
        None => {
            let mid = 0.5 * (a + b);
            if mid <= lo || mid >= hi {
                inside.clone()
            } else {
                exact(mid)
            }
        }
    })
}

/// `v(x)` and `Φ*(x)`.
pub fn value<P: Parametric + ?Sized>(p: &P, x: &Real, plan: &MinPlan) -> Res<MinResult> {
    minimize_section(&p.section(x)?, plan)
}

/// `Φ*(x)` from an already computed minimum.
pub fn solution_set(min: &MinResult) -> IntervalSet {
    min.argmin.clone()
}

/// `D_{u(x,·)}(λ; Φ(x))`.
pub fn level_set<P: Parametric + ?Sized>(p: &P, x: &Real, lambda: &Real, plan: &MinPlan) -> Res<IntervalSet> {
    let sec = p.section(x)?;
    section_level_set(&sec, &ExtendedReal::Finite(lambda.clone()), plan, &[])
}

/// The λ-truncation of a problem anchored at `x`.
#[derive(Clone, Debug)]
pub struct TruncatedProblem<'p, P: Parametric + ?Sized> {
    pub base: &'p P,
    pub lambda: Real,
    pub x_anchor: Real,
    /// `Φ_{λ,x}(x)`.
    pub anchor_set: IntervalSet,
    pub anchor_empty: bool,
    pub plan: MinPlan,
    name: String,
    /// Level sets `D(λ)` of the base problem by point.
    levels: Arc<Mutex<HashMap<String, IntervalSet>>>,
}

/// Builds `Φ_{λ,x}` and `u_{λ,x}`.
pub fn truncate<'p, P: Parametric + ?Sized>(
    p: &'p P,
    lambda: &Real,
    x: &Real,
    plan: &MinPlan,
) -> Res<TruncatedProblem<'p, P>> {
    let anchor_set = level_set(p, x, lambda, plan)?;
    Ok(TruncatedProblem {
        base: p,
        lambda: lambda.clone(),
        x_anchor: x.clone(),
        anchor_empty: anchor_set.is_empty(),
        anchor_set,
        plan: plan.clone(),
        name: format!("{}|lambda={},x={}", p.name(), lambda, x),
        levels: Arc::default(),
    })
}

impl<P: Parametric + ?Sized> TruncatedProblem<'_, P> {
    fn level_at(&self, z: &Real) -> Res<IntervalSet> {
        let key = z.to_string();
        if let Some(l) = self.levels.lock().unwrap().get(&key) {
            return Ok(l.clone());
        }
        let base = self.base.section(z)?;
        let level = section_level_set(&base, &ExtendedReal::Finite(self.lambda.clone()), &self.plan, &[])?;
        self.levels.lock().unwrap().insert(key, level.clone());
        Ok(level)
    }

    /// Whether `z` keeps its own data, as opposed to borrowing the anchor's.
    fn keeps(&self, z: &Real, level: &IntervalSet) -> bool {
        !level.is_empty() || *z == self.x_anchor
    }
}

impl<P: Parametric + ?Sized> Parametric for TruncatedProblem<'_, P> {
    fn name(&self) -> &str {
        &self.name
    }

    fn x_domain(&self) -> &IntervalSet {
        self.base.x_domain()
    }

    fn section(&self, z: &Real) -> Result<Section<'_>, ProblemError> {
        let base = self.base.section(z)?;
        let level = self.level_at(z)?;
        let base_x = self.base.section(&self.x_anchor)?;
        let u = base_x.u_ref();
        let fir = base_x.float_is_irrational();
        if self.keeps(z, &level) {
            let cost_x = base.cost_x().clone();
            Ok(Section::new(z.clone(), level, cost_x, base.u_ref(), fir))
        } else {
            Ok(Section::new(z.clone(), self.anchor_set.clone(), base_x.cost_x().clone(), u, fir))
        }
    }

    fn cost_at(&self, z: &Real, y: &Real) -> Result<ExtendedReal, ProblemError> {
        if self.keeps(z, &self.level_at(z)?) {
            self.base.cost_at(z, y)
        } else {
            self.base.cost_at(&self.x_anchor, y)
        }
    }

    fn mentions_rationality(&self) -> bool {
        self.base.mentions_rationality()
    }

    fn truncation(&self) -> Option<(Real, Real)> {
        Some((self.lambda.clone(), self.x_anchor.clone()))
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum TruncationError {
    #[error("truncated mapping is empty at the anchor; the construction is undefined")]
    EmptyAnchor,
    #[error(transparent)]
    Problem(#[from] ProblemError),
}

/// `v_{λ,x}(z)` and `Φ*_{λ,x}(z)`.
pub fn truncated_value<P: Parametric + ?Sized>(
    tp: &TruncatedProblem<'_, P>,
    z: &Real,
) -> Result<MinResult, TruncationError> {
    if tp.anchor_empty {
        return Err(TruncationError::EmptyAnchor);
    }
    Ok(value(tp, z, &tp.plan)?)
}

/// Cheap float comparison helper for tests and oracles.
pub fn close(a: &ExtendedReal, b: &ExtendedReal, tol: f64) -> bool {
    match (a, b) {
        (ExtendedReal::Finite(p), ExtendedReal::Finite(q)) => (p.to_f64() - q.to_f64()).abs() <= tol,
        _ => a == b,
    }
}
