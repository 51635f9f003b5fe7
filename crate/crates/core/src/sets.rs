//! Canonical finite unions of one-dimensional intervals.
//!
//! Every [`IntervalSet`] is kept in canonical form: pieces sorted, pairwise
//! disjoint and non-adjacent. Closedness, boundedness and compactness are then
//! read off the endpoint flags.

use std::cmp::Ordering;
use std::fmt;

use thiserror::Error;

use crate::numeric::{ExtendedReal, Real};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SetError {
    #[error("malformed interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    Malformed { lo: String, hi: String },
    #[error("excess of an empty set is undefined")]
    EmptyExcess,
    #[error("accumulation set of an empty family")]
    EmptyFamily,
    #[error("ladder radii must be positive and strictly decreasing")]
    BadLadder,
    #[error("cannot read interval set {0:?}")]
    Syntax(String),
}

/// One connected piece. Degenerate half-open intervals never exist: they
/// are empty and the constructor returns `None` for them.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Interval {
    lo: ExtendedReal,
    hi: ExtendedReal,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    /// Builds a piece, returning `Ok(None)` for the empty interval.
    /// Infinite endpoints are forced open.
    pub fn new(
        lo: ExtendedReal,
        lo_closed: bool,
        hi: ExtendedReal,
        hi_closed: bool,
    ) -> Result<Option<Interval>, SetError> {
        if lo > hi {
            return Err(SetError::Malformed {
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        let lo_closed = lo_closed && lo.is_finite();
        let hi_closed = hi_closed && hi.is_finite();
        if lo == hi && !(lo_closed && hi_closed) {
            return Ok(None);
        }
        Ok(Some(Interval {
            lo,
            hi,
            lo_closed,
            hi_closed,
        }))
    }

    pub fn closed(lo: Real, hi: Real) -> Result<Option<Interval>, SetError> {
        Interval::new(lo.into(), true, hi.into(), true)
    }

    pub fn point(p: Real) -> Interval {
        Interval {
            lo: p.clone().into(),
            hi: p.into(),
            lo_closed: true,
            hi_closed: true,
        }
    }

    pub fn whole_line() -> Interval {
        Interval {
            lo: ExtendedReal::NegInf,
            hi: ExtendedReal::PosInf,
            lo_closed: false,
            hi_closed: false,
        }
    }

    pub fn lo(&self) -> &ExtendedReal {
        &self.lo
    }

    pub fn hi(&self) -> &ExtendedReal {
        &self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_singleton(&self) -> bool {
        self.lo == self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn contains(&self, p: &Real) -> bool {
        let p = ExtendedReal::Finite(p.clone());
        let above = match self.lo.cmp(&p) {
            Ordering::Less => true,
            Ordering::Equal => self.lo_closed,
            Ordering::Greater => false,
        };
        let below = match p.cmp(&self.hi) {
            Ordering::Less => true,
            Ordering::Equal => self.hi_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    fn closure(&self) -> Interval {
        Interval {
            lo: self.lo.clone(),
            hi: self.hi.clone(),
            lo_closed: self.lo.is_finite(),
            hi_closed: self.hi.is_finite(),
        }
    }

    /// Distance from `p` to the closure of this piece.
    fn dist(&self, p: &Real) -> ExtendedReal {
        let pe = ExtendedReal::Finite(p.clone());
        if pe < self.lo {
            ExtendedReal::Finite(self.lo.as_real().unwrap().sub(p))
        } else if pe > self.hi {
            ExtendedReal::Finite(p.sub(self.hi.as_real().unwrap()))
        } else {
            ExtendedReal::zero()
        }
    }

    /// Lower endpoint ordering: by value, closed before open.
    fn cmp_lo(&self, o: &Interval) -> Ordering {
        self.lo
            .cmp(&o.lo)
            .then_with(|| o.lo_closed.cmp(&self.lo_closed))
    }

    /// `true` when `self` (sorted first) overlaps or touches `next`.
    fn joins(&self, next: &Interval) -> bool {
        match self.hi.cmp(&next.lo) {
            Ordering::Greater => true,
            Ordering::Equal => self.hi_closed || next.lo_closed,
            Ordering::Less => false,
        }
    }

    fn intersect(&self, o: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.cmp(&o.lo) {
            Ordering::Greater => (self.lo.clone(), self.lo_closed),
            Ordering::Less => (o.lo.clone(), o.lo_closed),
            Ordering::Equal => (self.lo.clone(), self.lo_closed && o.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.cmp(&o.hi) {
            Ordering::Less => (self.hi.clone(), self.hi_closed),
            Ordering::Greater => (o.hi.clone(), o.hi_closed),
            Ordering::Equal => (self.hi.clone(), self.hi_closed && o.hi_closed),
        };
        if lo > hi {
            return None;
        }
        Interval::new(lo, lo_closed, hi, hi_closed).ok().flatten()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_singleton() {
            return write!(f, "{{{}}}", self.lo);
        }
        write!(
            f,
            "{}{},{}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

/// A canonical finite union of intervals.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct IntervalSet {
    pieces: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        IntervalSet { pieces: Vec::new() }
    }

    pub fn whole_line() -> Self {
        IntervalSet {
            pieces: vec![Interval::whole_line()],
        }
    }

    pub fn point(p: Real) -> Self {
        IntervalSet {
            pieces: vec![Interval::point(p)],
        }
    }

    pub fn closed(lo: Real, hi: Real) -> Result<Self, SetError> {
        Ok(normalize(Interval::closed(lo, hi)?.into_iter().collect()))
    }

    pub fn from_interval(i: Option<Interval>) -> Self {
        normalize(i.into_iter().collect())
    }

    pub fn pieces(&self) -> &[Interval] {
        &self.pieces
    }

    pub fn is_empty(&self) -> bool {
        self.pieces.is_empty()
    }

    pub fn member(&self, p: &Real) -> bool {
        self.pieces.iter().any(|i| i.contains(p))
    }

    pub fn closure(&self) -> IntervalSet {
        normalize(self.pieces.iter().map(Interval::closure).collect())
    }

    pub fn is_closed(&self) -> bool {
        self.pieces.iter().all(|i| {
            (i.lo_closed || !i.lo.is_finite()) && (i.hi_closed || !i.hi.is_finite())
        })
    }

    pub fn is_bounded(&self) -> bool {
        self.pieces.iter().all(Interval::is_bounded)
    }

    pub fn is_compact(&self) -> bool {
        self.is_closed() && self.is_bounded()
    }

    /// Nonempty and compact, i.e. a member of the family of nonempty compact sets.
    pub fn is_nonempty_compact(&self) -> bool {
        !self.is_empty() && self.is_compact()
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for a in &self.pieces {
            for b in &other.pieces {
                if let Some(c) = a.intersect(b) {
                    out.push(c);
                }
            }
        }
        normalize(out)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        normalize(self.pieces.iter().chain(&other.pieces).cloned().collect())
    }

    /// `ℝ \ A`.
    pub fn complement(&self) -> IntervalSet {
        let mut out = Vec::new();
        let mut lo = ExtendedReal::NegInf;
        let mut lo_closed = false;
        for i in &self.pieces {
            if let Ok(Some(gap)) = Interval::new(lo.clone(), lo_closed, i.lo.clone(), !i.lo_closed) {
                out.push(gap);
            }
            lo = i.hi.clone();
            lo_closed = !i.hi_closed;
        }
        if let Ok(Some(gap)) = Interval::new(lo, lo_closed, ExtendedReal::PosInf, false) {
            out.push(gap);
        }
        normalize(out)
    }

    /// `A \ B`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement())
    }

    /// Smallest closed interval containing the set; empty for the empty set.
    pub fn hull(&self) -> IntervalSet {
        match (self.inf(), self.sup()) {
            (Some(lo), Some(hi)) => IntervalSet::from_interval(
                Interval::new(lo.clone(), true, hi.clone(), true).ok().flatten(),
            ),
            _ => IntervalSet::empty(),
        }
    }

    /// `A ⊆ B` as point sets.
    pub fn is_subset(&self, other: &IntervalSet) -> bool {
        self.intersect(other) == *self
    }

    pub fn inf(&self) -> Option<&ExtendedReal> {
        self.pieces.first().map(|i| &i.lo)
    }

    pub fn sup(&self) -> Option<&ExtendedReal> {
        self.pieces.last().map(|i| &i.hi)
    }

    /// `sup |y|` over the set, `-inf` when empty.
    pub fn sup_abs(&self) -> ExtendedReal {
        match (self.inf(), self.sup()) {
            (Some(lo), Some(hi)) => lo.neg().max(hi.clone()),
            _ => ExtendedReal::NegInf,
        }
    }

    /// All finite endpoints, in order, without duplicates.
    pub fn finite_endpoints(&self) -> Vec<Real> {
        let mut out: Vec<Real> = Vec::new();
        for i in &self.pieces {
            for e in [&i.lo, &i.hi] {
                if let ExtendedReal::Finite(r) = e {
                    if out.last() != Some(r) {
                        out.push(r.clone());
                    }
                }
            }
        }
        out
    }

    /// A member of the set within `dist(p, S) + slack` of `p`.
    pub fn nearest_member(&self, p: &Real, slack: f64) -> Option<Real> {
        let mut best: Option<(ExtendedReal, Real)> = None;
        for i in &self.pieces {
            let cand = if i.contains(p) {
                p.clone()
            } else {
                let pe = ExtendedReal::Finite(p.clone());
                let (end, closed) = if pe <= i.lo {
                    (i.lo.as_real().unwrap().clone(), i.lo_closed)
                } else {
                    (i.hi.as_real().unwrap().clone(), i.hi_closed)
                };
                if closed {
                    end
                } else {
                    // step inside an open endpoint by at most half the piece width
                    let inward = if pe <= i.lo { 1.0 } else { -1.0 };
                    let width = i.hi.to_f64() - i.lo.to_f64();
                    let step = slack.min(width / 2.0).max(f64::MIN_POSITIVE);
                    let step = Real::exact_from_f64(inward * step).unwrap_or(Real::zero());
                    end.add(&step)
                }
            };
            let d = ExtendedReal::Finite(cand.sub(p).abs());
            if best.as_ref().map_or(true, |(bd, _)| d < *bd) {
                best = Some((d, cand));
            }
        }
        best.map(|(_, c)| c)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return write!(f, "{{}}");
        }
        for (k, i) in self.pieces.iter().enumerate() {
            if k > 0 {
                write!(f, " U ")?;
            }
            write!(f, "{i}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for IntervalSet {
    type Err = SetError;

    /// Reads the display form back: `{}`, `{p}`, `[a,b)` pieces joined by ` U `.
    fn from_str(text: &str) -> Result<Self, SetError> {
        let text = text.trim();
        let bad = || SetError::Syntax(text.to_string());
        if text == "{}" {
            return Ok(IntervalSet::empty());
        }
        let mut pieces = Vec::new();
        for part in text.split(" U ") {
            let part = part.trim();
            if let Some(inner) = part.strip_prefix('{').and_then(|r| r.strip_suffix('}')) {
                pieces.push(Interval::point(inner.trim().parse().map_err(|_| bad())?));
                continue;
            }
            let lo_closed = match part.chars().next() {
                Some('[') => true,
                Some('(') => false,
                _ => return Err(bad()),
            };
            let hi_closed = match part.chars().last() {
                Some(']') => true,
                Some(')') => false,
                _ => return Err(bad()),
            };
            let body = &part[1..part.len() - 1];
            let (lo, hi) = body.split_once(',').ok_or_else(bad)?;
            let lo: ExtendedReal = lo.trim().parse().map_err(|_| bad())?;
            let hi: ExtendedReal = hi.trim().parse().map_err(|_| bad())?;
            if let Some(i) = Interval::new(lo, lo_closed, hi, hi_closed)? {
                pieces.push(i);
            }
        }
        Ok(normalize(pieces))
    }
}

serde_via_string!(IntervalSet, "interval set");

/// Sorts and merges pieces into canonical form. The union of the inputs is
/// preserved as a point set.
pub fn normalize(mut pieces: Vec<Interval>) -> IntervalSet {
    pieces.sort_by(Interval::cmp_lo);
    let mut out: Vec<Interval> = Vec::with_capacity(pieces.len());
    for p in pieces {
        match out.last_mut() {
            Some(last) if last.joins(&p) => match last.hi.cmp(&p.hi) {
                Ordering::Less => {
                    last.hi = p.hi;
                    last.hi_closed = p.hi_closed;
                }
                Ordering::Equal => last.hi_closed |= p.hi_closed,
                Ordering::Greater => {}
            },
            _ => out.push(p),
        }
    }
    IntervalSet { pieces: out }
}

/// `inf { |p − s| : s ∈ S }`, `+∞` for the empty set.
pub fn dist(p: &Real, s: &IntervalSet) -> ExtendedReal {
    s.pieces
        .iter()
        .map(|i| i.dist(p))
        .fold(ExtendedReal::PosInf, ExtendedReal::min)
}

/// One-sided Hausdorff semi-distance `sup_{a ∈ A} dist(a, B)`.
pub fn excess(a: &IntervalSet, b: &IntervalSet) -> Result<ExtendedReal, SetError> {
    if a.is_empty() {
        return Err(SetError::EmptyExcess);
    }
    if b.is_empty() {
        return Ok(ExtendedReal::PosInf);
    }
    let b_lo = b.inf().unwrap();
    let b_hi = b.sup().unwrap();
    let gap_mids: Vec<Real> = b
        .pieces
        .windows(2)
        .map(|w| w[0].hi.as_real().unwrap().midpoint(w[1].lo.as_real().unwrap()))
        .collect();

    let mut worst = ExtendedReal::zero();
    for piece in &a.pieces {
        if (piece.lo == ExtendedReal::NegInf && *b_lo != ExtendedReal::NegInf)
            || (piece.hi == ExtendedReal::PosInf && *b_hi != ExtendedReal::PosInf)
        {
            return Ok(ExtendedReal::PosInf);
        }
        let closed = piece.closure();
        let candidates = [&piece.lo, &piece.hi]
            .into_iter()
            .filter_map(ExtendedReal::as_real)
            .chain(gap_mids.iter().filter(|m| closed.contains(m)));
        for c in candidates {
            worst = worst.max(dist(c, b));
        }
    }
    Ok(worst)
}

/// `inf { |a − b| : a ∈ A, b ∈ B }`, `+∞` when either set is empty.
pub fn gap(a: &IntervalSet, b: &IntervalSet) -> ExtendedReal {
    let mut best = ExtendedReal::PosInf;
    for p in &a.pieces {
        for q in &b.pieces {
            let d1 = q.lo.sub(&p.hi).unwrap_or(ExtendedReal::NegInf);
            let d2 = p.lo.sub(&q.hi).unwrap_or(ExtendedReal::NegInf);
            best = best.min(ExtendedReal::zero().max(d1).max(d2));
        }
    }
    best
}

/// `max(e(A,B), e(B,A))`; `+∞` when exactly one side is empty, `0` for two empty sets.
pub fn hausdorff(a: &IntervalSet, b: &IntervalSet) -> ExtendedReal {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => ExtendedReal::zero(),
        (true, false) | (false, true) => ExtendedReal::PosInf,
        _ => excess(a, b).unwrap().max(excess(b, a).unwrap()),
    }
}

/// Finite-ladder approximation of the accumulation points of a family of
/// sets indexed by shrinking radii.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Accumulation {
    /// `⋂_k cl(⋃_{j≥k} F(δ_j))` restricted to the window.
    pub set: IntervalSet,
    /// Some member of the tail leaves the window.
    pub escaped: bool,
}

/// The default ladder `δ_k = 2^{-k}`, `k = 1..=20`.
pub fn default_ladder() -> Vec<f64> {
    (1..=20).map(|k| 0.5f64.powi(k)).collect()
}

/// Accumulation set of `family[k] = F(δ_k)` for a strictly decreasing ladder,
/// intersected with `window`.
pub fn accumulation_set(
    family: &[(f64, IntervalSet)],
    window: &IntervalSet,
) -> Result<Accumulation, SetError> {
    if family.is_empty() {
        return Err(SetError::EmptyFamily);
    }
    if family.iter().any(|(d, _)| !(*d > 0.0))
        || family.windows(2).any(|w| !(w[1].0 < w[0].0))
    {
        return Err(SetError::BadLadder);
    }
    let mut tail = IntervalSet::empty();
    let mut acc: Option<IntervalSet> = None;
    for (_, s) in family.iter().rev() {
        tail = tail.union(s);
        let cl = tail.closure();
        acc = Some(match acc {
            None => cl,
            Some(a) => a.intersect(&cl),
        });
    }
    let last = &family.last().unwrap().1;
    let escaped = !last.is_subset(window);
    Ok(Accumulation {
        set: acc.unwrap().intersect(window),
        escaped,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Real {
        Real::int(n)
    }

    fn iv(lo: i64, lc: bool, hi: i64, hc: bool) -> Interval {
        Interval::new(r(lo).into(), lc, r(hi).into(), hc).unwrap().unwrap()
    }

    fn half_open_unit() -> IntervalSet {
        normalize(vec![iv(-1, true, 0, false)])
    }

    #[test]
    fn complement_and_gap() {
        let a = normalize(vec![iv(-1, true, 0, false), iv(2, false, 3, true)]);
        let c = a.complement();
        assert_eq!(c.to_string(), "(-inf,-1) U [0,2] U (3,+inf)");
        assert_eq!(c.complement(), a);
        assert!(a.intersect(&c).is_empty());
        assert_eq!(a.difference(&half_open_unit()), normalize(vec![iv(2, false, 3, true)]));
        assert_eq!(gap(&a, &IntervalSet::point(r(1))), ExtendedReal::Finite(r(1)));
        assert_eq!(gap(&a, &IntervalSet::point(r(0))), ExtendedReal::zero());
        assert_eq!(gap(&a, &IntervalSet::empty()), ExtendedReal::PosInf);
        assert_eq!(a.hull(), IntervalSet::closed(r(-1), r(3)).unwrap());
    }

    #[test]
    fn adjacent_closed_pieces_merge() {
        let s = normalize(vec![iv(0, true, 1, true), iv(1, true, 2, true)]);
        assert_eq!(s, normalize(vec![iv(0, true, 2, true)]));
        assert_eq!(normalize(vec![]), IntervalSet::empty());
        assert_eq!(half_open_unit().pieces().len(), 1);
    }

    #[test]
    fn open_gap_points_do_not_merge() {
        let s = normalize(vec![iv(0, false, 1, false), iv(1, false, 2, false)]);
        assert_eq!(s.pieces().len(), 2);
        assert_eq!(s.closure(), normalize(vec![iv(0, true, 2, true)]));
        let t = normalize(vec![iv(0, false, 1, false), iv(1, true, 2, false)]);
        assert_eq!(t.pieces().len(), 1);
    }

    #[test]
    fn malformed_and_degenerate_intervals() {
        assert!(matches!(
            Interval::new(r(1).into(), true, r(0).into(), true),
            Err(SetError::Malformed { .. })
        ));
        assert_eq!(Interval::new(r(1).into(), true, r(1).into(), false), Ok(None));
        let ray = Interval::new(r(0).into(), true, ExtendedReal::PosInf, true)
            .unwrap()
            .unwrap();
        assert!(!ray.hi_closed());
    }

    #[test]
    fn membership_respects_flags() {
        let s = half_open_unit();
        assert!(!s.member(&r(0)));
        assert!(s.member(&r(-1)));
        assert!(!IntervalSet::empty().member(&r(0)));
    }

    #[test]
    fn distances() {
        assert_eq!(dist(&r(0), &half_open_unit()), ExtendedReal::zero());
        let unit = IntervalSet::closed(r(0), r(1)).unwrap();
        assert_eq!(dist(&r(3), &unit), ExtendedReal::Finite(r(2)));
        assert_eq!(dist(&r(0), &IntervalSet::empty()), ExtendedReal::PosInf);
    }

    #[test]
    fn excess_cases() {
        let two = IntervalSet::point(Real::one().div(&Real::ratio(1, 2)).unwrap());
        assert_eq!(excess(&two, &IntervalSet::point(r(0))), Ok(ExtendedReal::Finite(r(2))));
        let a = IntervalSet::closed(r(0), r(1)).unwrap();
        let b = IntervalSet::closed(r(0), r(2)).unwrap();
        assert_eq!(excess(&a, &b), Ok(ExtendedReal::zero()));
        assert_eq!(excess(&IntervalSet::whole_line(), &a), Ok(ExtendedReal::PosInf));
        assert_eq!(excess(&IntervalSet::empty(), &a), Err(SetError::EmptyExcess));
        // gap midpoint dominates: [0,10] against {0} ∪ {10}
        let ends = IntervalSet::point(r(0)).union(&IntervalSet::point(r(10)));
        assert_eq!(excess(&IntervalSet::closed(r(0), r(10)).unwrap(), &ends), Ok(ExtendedReal::Finite(r(5))));
    }

    #[test]
    fn compactness_predicates() {
        assert_eq!(half_open_unit().closure(), IntervalSet::closed(r(-1), r(0)).unwrap());
        assert!(!IntervalSet::whole_line().is_compact());
        assert!(IntervalSet::closed(Real::ratio(-1, 2), Real::ratio(1, 2)).unwrap().is_compact());
        assert!(!half_open_unit().is_closed());
    }

    #[test]
    fn accumulation_of_shrinking_intervals() {
        let ladder = default_ladder();
        let window = IntervalSet::closed(r(-100), r(100)).unwrap();
        let fam: Vec<_> = ladder
            .iter()
            .map(|&d| {
                let d = Real::exact_from_f64(d).unwrap();
                (d.to_f64(), IntervalSet::closed(d.neg(), d).unwrap())
            })
            .collect();
        let acc = accumulation_set(&fam, &window).unwrap();
        assert!(!acc.escaped);
        let h = hausdorff(&acc.set, &IntervalSet::point(r(0)));
        assert!(h.to_f64() <= *ladder.last().unwrap());
    }

    #[test]
    fn accumulation_of_diverging_points_escapes() {
        let window = IntervalSet::closed(r(-100), r(100)).unwrap();
        let fam: Vec<_> = default_ladder()
            .iter()
            .map(|&d| (d, IntervalSet::point(Real::exact_from_f64(1.0 / d).unwrap())))
            .collect();
        let acc = accumulation_set(&fam, &window).unwrap();
        assert!(acc.set.is_empty());
        assert!(acc.escaped);
    }

    #[test]
    fn accumulation_of_constant_family() {
        let x = Real::ratio(1, 5);
        let s = IntervalSet::closed(x.sub(&Real::ratio(1, 2)), x.add(&Real::ratio(1, 2))).unwrap();
        let fam: Vec<_> = default_ladder().iter().map(|&d| (d, s.clone())).collect();
        let window = IntervalSet::closed(r(-10), r(10)).unwrap();
        assert_eq!(accumulation_set(&fam, &window).unwrap().set, s);
        assert_eq!(accumulation_set(&[], &window), Err(SetError::EmptyFamily));
    }

    #[test]
    fn nearest_member_steps_inside_open_ends() {
        let s = half_open_unit();
        let m = s.nearest_member(&r(0), 1e-3).unwrap();
        assert!(s.member(&m));
        assert!(m.to_f64() > -1.1e-3);
    }
}
