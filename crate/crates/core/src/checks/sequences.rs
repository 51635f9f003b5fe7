//! Geometric sequences `x_n = x ± δ₀ rⁿ` converging to a point.

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::numeric::Real;
use crate::sets::IntervalSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Tag {
    Plain,
    /// Every term is rational.
    Rational,
    /// Every term is irrational.
    Irrational,
}

/// One sequence family: `x + side·δ₀·rⁿ`, `n = 1..=depth`; `side = 0` is the
/// constant sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scheme {
    pub side: i8,
    pub tag: Tag,
    pub ratio: f64,
    pub delta0: f64,
    pub depth: u32,
}

impl Scheme {
    pub fn id(&self) -> String {
        let dir = match self.side {
            0 => "constant",
            s if s < 0 => "left",
            _ => "right",
        };
        let tag = match self.tag {
            Tag::Plain => "",
            Tag::Rational => "/tagged-rational",
            Tag::Irrational => "/tagged-irrational",
        };
        format!("{dir}{tag}:r={}:d0={:e}:n={}", self.ratio, self.delta0, self.depth)
    }

    /// The sequence converging to `x`, or `None` when a term would leave
    /// `window` or violate the tag.
    pub fn generate(&self, x: &Real, window: &IntervalSet) -> Option<Vec<Real>> {
        let n = self.depth as usize;
        if self.side == 0 {
            return window.member(x).then(|| vec![x.clone(); n]);
        }
        let r = simple(self.ratio)?;
        let mut step = simple(self.delta0 * f64::from(self.side))?;
        if self.tag == Tag::Irrational {
            step = step.mul(&Real::root2_multiple(BigRational::new(BigInt::from(1), BigInt::from(2))));
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            step = step.mul(&r);
            let mut t = x.add(&step);
            match self.tag {
                Tag::Plain => {}
                Tag::Rational => {
                    if !matches!(t.is_rational(false), Ok(true)) {
                        // a dyadic rational strictly on the same side of x
                        let mut q = Real::exact_from_f64(t.to_f64()).ok()?;
                        if (q.sub(x).signum() as i32) != i32::from(self.side) {
                            q = Real::exact_from_f64(t.to_f64() + step.to_f64() / 4.0).ok()?;
                        }
                        t = q;
                    }
                    if !matches!(t.is_rational(false), Ok(true)) {
                        return None;
                    }
                }
                Tag::Irrational => {
                    if !matches!(t.is_rational(false), Ok(false)) {
                        return None;
                    }
                }
            }
            if !window.member(&t) || t == *x {
                return None;
            }
            out.push(t);
        }
        Some(out)
    }
}

/// The simplest rational within a relative `1e-12` of `v`, so that decimal
/// parameters such as `0.1` become `1/10`.
pub(crate) fn simple(v: f64) -> Option<Real> {
    let w = 1e-12 * v.abs();
    let lo = BigRational::from_float(v - w)?;
    let hi = BigRational::from_float(v + w)?;
    Some(Real::from_rational(crate::minimizer::simplest_rational(&lo, &hi)))
}

/// Sequences generated around each test point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SequencePlan {
    pub ratio: f64,
    /// `δ₀` as a fraction of the window width.
    pub delta0_fraction: f64,
    pub depth: u32,
    /// Add tagged rational and irrational variants: `None` decides from the
    /// problem (only when it reads `is_rat`).
    pub tagged: Option<bool>,
    pub adversarial_budget: u64,
    pub seed: u64,
}

impl Default for SequencePlan {
    fn default() -> Self {
        SequencePlan {
            ratio: 0.5,
            delta0_fraction: 0.1,
            depth: 40,
            tagged: None,
            adversarial_budget: 10_000,
            seed: 0,
        }
    }
}

/// Width of the piece of `window` around `x`; `1` when unbounded.
fn local_width(x: &Real, window: &IntervalSet) -> f64 {
    let lo = window.inf().map(|e| e.to_f64()).unwrap_or(0.0);
    let hi = window.sup().map(|e| e.to_f64()).unwrap_or(0.0);
    let w = hi - lo;
    if w.is_finite() && w > 0.0 {
        w
    } else if window.member(x) {
        1.0
    } else {
        0.0
    }
}

/// Room available on `side` of `x` inside `window`, capped at `cap`.
fn room(x: &Real, side: i8, window: &IntervalSet, cap: f64) -> f64 {
    let xf = x.to_f64();
    for piece in window.pieces() {
        if piece.contains(x) {
            let edge = if side > 0 { piece.hi().to_f64() } else { piece.lo().to_f64() };
            return (edge - xf).abs().min(cap);
        }
    }
    0.0
}

impl SequencePlan {
    /// The schemes around `x`: constant, left and right, plus tagged
    /// variants when `tagged`.
    pub fn schemes(&self, x: &Real, window: &IntervalSet, tagged: bool, with_constant: bool) -> Vec<Scheme> {
        let tagged = self.tagged.unwrap_or(tagged);
        let d0 = self.delta0_fraction * local_width(x, window);
        let mut out = Vec::new();
        if with_constant {
            out.push(Scheme {
                side: 0,
                tag: Tag::Plain,
                ratio: self.ratio,
                delta0: 0.0,
                depth: self.depth,
            });
        }
        for side in [-1i8, 1] {
            let d = room(x, side, window, d0);
            if !(d > 0.0) {
                continue;
            }
            let tags: &[Tag] = if tagged {
                &[Tag::Plain, Tag::Rational, Tag::Irrational]
            } else {
                &[Tag::Plain]
            };
            for &tag in tags {
                out.push(Scheme {
                    side,
                    tag,
                    ratio: self.ratio,
                    delta0: d,
                    depth: self.depth,
                });
            }
        }
        out
    }

    /// All sequences of [`SequencePlan::schemes`] that stay in `window`.
    pub fn sequences(
        &self,
        x: &Real,
        window: &IntervalSet,
        tagged: bool,
        with_constant: bool,
    ) -> Vec<(String, Vec<Real>)> {
        self.schemes(x, window, tagged, with_constant)
            .into_iter()
            .filter_map(|s| s.generate(x, window).map(|seq| (s.id(), seq)))
            .collect()
    }
}

/// Indices of the trailing terms that decide a limit.
pub(crate) fn tail_range(len: usize) -> std::ops::Range<usize> {
    len.saturating_sub(super::TAIL)..len
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> IntervalSet {
        IntervalSet::closed(Real::zero(), Real::one()).unwrap()
    }

    #[test]
    fn one_sided_at_boundary() {
        let plan = SequencePlan::default();
        let seqs = plan.sequences(&Real::zero(), &unit(), false, false);
        assert_eq!(seqs.len(), 1);
        let (_, s) = &seqs[0];
        assert_eq!(s.len(), 40);
        assert_eq!(s[0], Real::ratio(1, 20));
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn tagged_variants() {
        let plan = SequencePlan::default();
        let a = Real::root2_multiple(BigRational::new(1.into(), 2.into()));
        let seqs = plan.sequences(&a, &unit(), true, true);
        assert_eq!(seqs.len(), 7);
        for (id, s) in &seqs {
            if id.contains("tagged-rational") {
                assert!(s.iter().all(|t| t.is_rational(false) == Ok(true)), "{id}");
            }
            if id.contains("tagged-irrational") {
                assert!(s.iter().all(|t| t.is_rational(false) == Ok(false)), "{id}");
            }
            let last = s.last().unwrap().sub(&a).to_f64().abs();
            assert!(last < 1e-12, "{id}: {last}");
        }
    }
}
