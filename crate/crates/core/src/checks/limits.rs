//! Limit behaviour of set sequences `S_n` along `x_n → x`: points escaping
//! to infinity and accumulation points outside a target set.

use num_rational::BigRational;

use crate::minimizer::simplest_rational;
use crate::numeric::{ExtendedReal, Real};
use crate::sets::{dist, IntervalSet};

/// Tail sets grow without bound: some set is unbounded, or `sup |S_n|` is
/// nondecreasing and gains two orders of magnitude over the tail.
pub(crate) fn escapes(sets: &[IntervalSet]) -> bool {
    let live: Vec<&IntervalSet> = sets.iter().filter(|s| !s.is_empty()).collect();
    if live.iter().any(|s| !s.is_bounded()) {
        return true;
    }
    if live.len() < 3 {
        return false;
    }
    let m: Vec<f64> = live.iter().map(|s| s.sup_abs().to_f64()).collect();
    m.windows(2).all(|w| w[1] >= w[0]) && m[m.len() - 1] >= 100.0 * (1.0 + m[0])
}

/// A member of `s` far from the origin, growing with `n` on unbounded pieces.
pub(crate) fn far_member(s: &IntervalSet, n: usize) -> Option<Real> {
    let scale = Real::exact_from_f64(2f64.powi(n as i32 + 1)).ok()?;
    for piece in s.pieces().iter().rev() {
        if !piece.hi().is_finite() {
            let base = piece.lo().as_real().cloned().unwrap_or_else(Real::zero).max(Real::zero());
            return Some(base.add(&Real::one()).mul(&scale));
        }
    }
    if let Some(piece) = s.pieces().first() {
        if !piece.lo().is_finite() {
            let base = piece.hi().as_real().cloned().unwrap_or_else(Real::zero).min(Real::zero());
            return Some(base.sub(&Real::one()).mul(&scale));
        }
    }
    let lo = s.inf()?.as_real()?.clone();
    let hi = s.sup()?.as_real()?.clone();
    let target = if hi.abs() >= lo.abs() { hi } else { lo };
    s.nearest_member(&target, 1e-12 * (1.0 + target.to_f64().abs()))
}

fn near(a: &Real, b: &Real, tol: f64) -> bool {
    a.sub(b).to_f64().abs() <= tol * (1.0 + b.to_f64().abs())
}

/// Moves `c` onto an endpoint of `target`, or onto the simplest rational,
/// when one lies within `tol`.
fn snap(c: &Real, target: &IntervalSet, tol: f64) -> Real {
    for e in target.finite_endpoints() {
        if near(c, &e, tol) {
            return e;
        }
    }
    let cf = c.to_f64();
    let w = 0.1 * tol * (1.0 + cf.abs());
    match (BigRational::from_float(cf - w), BigRational::from_float(cf + w)) {
        (Some(lo), Some(hi)) => Real::from_rational(simplest_rational(&lo, &hi)),
        _ => c.clone(),
    }
}

/// A point outside `target` that every tail set approaches.
pub(crate) fn stray_point(sets: &[IntervalSet], target: &IntervalSet, tol: f64) -> Option<Real> {
    let live: Vec<&IntervalSet> = sets.iter().filter(|s| !s.is_empty()).collect();
    let last = *live.last()?;
    let mut candidates = last.finite_endpoints();
    candidates.extend(target.finite_endpoints().into_iter().filter(|e| !target.member(e)));
    for piece in last.difference(target).pieces() {
        match (piece.lo().as_real(), piece.hi().as_real()) {
            (Some(a), Some(b)) => candidates.push(a.midpoint(b)),
            (Some(a), None) => candidates.push(a.add(&Real::one())),
            (None, Some(b)) => candidates.push(b.sub(&Real::one())),
            (None, None) => candidates.push(Real::zero()),
        }
    }
    for c in candidates {
        let c = snap(&c, target, tol);
        if target.member(&c) {
            continue;
        }
        let d: Vec<f64> = live.iter().map(|s| dist(&c, s).to_f64()).collect();
        let scale = 1.0 + c.to_f64().abs();
        if d[d.len() - 1] <= tol * scale && d.iter().all(|v| *v <= 1e-6 * scale) {
            return Some(c);
        }
    }
    None
}

/// Members of `s_n` converging to `c`.
pub(crate) fn approach(s: &IntervalSet, c: &Real, n: usize) -> Option<Real> {
    let slack = 1e-3 * 0.5f64.powi(n as i32 + 1) * (1.0 + c.to_f64().abs());
    s.nearest_member(c, slack)
}

/// `dist(c, target)` as a witness margin.
pub(crate) fn stray_margin(c: &Real, target: &IntervalSet) -> f64 {
    match dist(c, target) {
        ExtendedReal::PosInf => f64::INFINITY,
        d => d.to_f64(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn closed(a: i64, b: i64) -> IntervalSet {
        IntervalSet::closed(Real::int(a), Real::int(b)).unwrap()
    }

    #[test]
    fn growing_points_escape() {
        let sets: Vec<IntervalSet> = (1..=10).map(|n| IntervalSet::point(Real::int(1 << n))).collect();
        assert!(escapes(&sets));
        let steady: Vec<IntervalSet> = (1..=10).map(|_| closed(0, 1)).collect();
        assert!(!escapes(&steady));
        assert!(escapes(&[IntervalSet::whole_line()]));
    }

    #[test]
    fn open_endpoint_is_a_stray() {
        let target = IntervalSet::from_interval(
            crate::sets::Interval::new(Real::int(-1).into(), true, Real::zero().into(), false).unwrap(),
        );
        let sets = vec![target.clone(); 10];
        assert_eq!(stray_point(&sets, &target, 1e-7), Some(Real::zero()));
        assert_eq!(stray_point(&sets, &closed(-1, 0), 1e-7), None);
    }

    #[test]
    fn jump_is_a_stray() {
        let sets = vec![IntervalSet::point(Real::one()); 10];
        assert_eq!(stray_point(&sets, &IntervalSet::point(Real::zero()), 1e-7), Some(Real::one()));
    }
}
