//! Scalars used throughout the crate.
//!
//! A [`Real`] is either an exact element of the quadratic field `Q(√2)` or a
//! plain `f64` approximation. Exact values carry rationality information: a
//! value is rational iff its `√2` coefficient is zero. That single symbolic
//! extension is enough to tag irrational sample points while keeping all
//! arithmetic on them exact.
//!
//! [`ExtendedReal`] adds `±∞` on top, with the usual infimum conventions.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("undefined sum of +inf and -inf")]
    InfMinusInf,
    #[error("non-finite float {0}")]
    NonFinite(f64),
    #[error("cannot parse number {0:?}")]
    Parse(String),
    #[error("rationality of an approximate value is unknown")]
    UnknownRationality,
}

/// `rat + root2 * √2` with exact rational coefficients.
#[derive(Clone, Debug)]
pub struct Surd {
    rat: BigRational,
    root2: BigRational,
    approx: f64,
}

impl Surd {
    pub fn new(rat: BigRational, root2: BigRational) -> Self {
        let approx = rat.to_f64().unwrap_or(f64::NAN)
            + root2.to_f64().unwrap_or(f64::NAN) * std::f64::consts::SQRT_2;
        Surd { rat, root2, approx }
    }

    pub fn rational(rat: BigRational) -> Self {
        Surd::new(rat, BigRational::zero())
    }

    pub fn rational_part(&self) -> &BigRational {
        &self.rat
    }

    pub fn root2_part(&self) -> &BigRational {
        &self.root2
    }

    pub fn is_rational(&self) -> bool {
        self.root2.is_zero()
    }

    pub fn is_zero(&self) -> bool {
        self.rat.is_zero() && self.root2.is_zero()
    }

    /// Exact sign of `rat + root2·√2`.
    pub fn signum(&self) -> Ordering {
        let a = self.rat.cmp(&BigRational::zero());
        let b = self.root2.cmp(&BigRational::zero());
        match (a, b) {
            (x, Ordering::Equal) => x,
            (Ordering::Equal, y) => y,
            (x, y) if x == y => x,
            (Ordering::Greater, _) => {
                // a > 0 > b√2
                let two_b2 = &self.root2 * &self.root2 * BigRational::from_integer(2.into());
                (&self.rat * &self.rat).cmp(&two_b2)
            }
            _ => {
                let two_b2 = &self.root2 * &self.root2 * BigRational::from_integer(2.into());
                two_b2.cmp(&(&self.rat * &self.rat))
            }
        }
    }

    fn add(&self, o: &Surd) -> Surd {
        Surd::new(&self.rat + &o.rat, &self.root2 + &o.root2)
    }

    fn sub(&self, o: &Surd) -> Surd {
        Surd::new(&self.rat - &o.rat, &self.root2 - &o.root2)
    }

    fn mul(&self, o: &Surd) -> Surd {
        let two = BigRational::from_integer(2.into());
        Surd::new(
            &self.rat * &o.rat + two * &self.root2 * &o.root2,
            &self.rat * &o.root2 + &self.root2 * &o.rat,
        )
    }

    fn neg(&self) -> Surd {
        Surd::new(-&self.rat, -&self.root2)
    }

    fn div(&self, o: &Surd) -> Result<Surd, NumError> {
        if o.is_zero() {
            return Err(NumError::DivisionByZero);
        }
        // (a + b√2)/(c + d√2) = (a + b√2)(c − d√2) / (c² − 2d²)
        let two = BigRational::from_integer(2.into());
        let norm = &o.rat * &o.rat - &two * &o.root2 * &o.root2;
        let conj = Surd::new(o.rat.clone(), -&o.root2);
        let num = self.mul(&conj);
        Ok(Surd::new(num.rat / &norm, num.root2 / &norm))
    }
}

impl PartialEq for Surd {
    fn eq(&self, other: &Self) -> bool {
        self.rat == other.rat && self.root2 == other.root2
    }
}

impl Eq for Surd {}

/// A finite real number, exact when it can be.
#[derive(Clone, Debug)]
pub enum Real {
    Exact(Surd),
    Approx(f64),
}

/// Sample points are reals; exact points carry their rationality tag.
pub type TaggedPoint = Real;

impl Real {
    pub fn int(n: i64) -> Real {
        Real::Exact(Surd::rational(BigRational::from_integer(n.into())))
    }

    pub fn ratio(n: i64, d: i64) -> Real {
        Real::Exact(Surd::rational(BigRational::new(n.into(), d.into())))
    }

    pub fn from_rational(q: BigRational) -> Real {
        Real::Exact(Surd::rational(q))
    }

    pub fn zero() -> Real {
        Real::int(0)
    }

    pub fn one() -> Real {
        Real::int(1)
    }

    /// `q · √2`, the canonical tagged irrational.
    pub fn root2_multiple(q: BigRational) -> Real {
        Real::Exact(Surd::new(BigRational::zero(), q))
    }

    pub fn surd(rat: BigRational, root2: BigRational) -> Real {
        Real::Exact(Surd::new(rat, root2))
    }

    pub fn approx(v: f64) -> Result<Real, NumError> {
        if v.is_finite() {
            Ok(Real::Approx(v))
        } else {
            Err(NumError::NonFinite(v))
        }
    }

    /// Exact conversion of a finite float into a rational point.
    pub fn exact_from_f64(v: f64) -> Result<Real, NumError> {
        BigRational::from_float(v)
            .map(Real::from_rational)
            .ok_or(NumError::NonFinite(v))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Real::Exact(s) => s.approx,
            Real::Approx(v) => *v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Real::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Real::Exact(s) if s.is_rational() => Some(&s.rat),
            _ => None,
        }
    }

    /// Exact rationality; approximate values answer `float_is_irrational`
    /// when given, and error otherwise.
    pub fn is_rational(&self, float_is_irrational: bool) -> Result<bool, NumError> {
        match self {
            Real::Exact(s) => Ok(s.is_rational()),
            Real::Approx(_) if float_is_irrational => Ok(false),
            Real::Approx(_) => Err(NumError::UnknownRationality),
        }
    }

    pub fn signum(&self) -> Ordering {
        match self {
            Real::Exact(s) => s.signum(),
            Real::Approx(v) => v.partial_cmp(&0.0).unwrap_or(Ordering::Equal),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.signum() == Ordering::Equal
    }

    pub fn add(&self, o: &Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a.add(b)),
            _ => Real::Approx(self.to_f64() + o.to_f64()),
        }
    }

    pub fn sub(&self, o: &Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a.sub(b)),
            _ => Real::Approx(self.to_f64() - o.to_f64()),
        }
    }

    pub fn mul(&self, o: &Real) -> Real {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => Real::Exact(a.mul(b)),
            _ => Real::Approx(self.to_f64() * o.to_f64()),
        }
    }

    pub fn div(&self, o: &Real) -> Result<Real, NumError> {
        match (self, o) {
            (Real::Exact(a), Real::Exact(b)) => a.div(b).map(Real::Exact),
            _ => {
                let d = o.to_f64();
                if d == 0.0 {
                    return Err(NumError::DivisionByZero);
                }
                Real::approx(self.to_f64() / d)
            }
        }
    }

    pub fn neg(&self) -> Real {
        match self {
            Real::Exact(a) => Real::Exact(a.neg()),
            Real::Approx(v) => Real::Approx(-v),
        }
    }

    pub fn abs(&self) -> Real {
        if self.signum() == Ordering::Less {
            self.neg()
        } else {
            self.clone()
        }
    }

    pub fn min(&self, o: &Real) -> Real {
        if self <= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn max(&self, o: &Real) -> Real {
        if self >= o {
            self.clone()
        } else {
            o.clone()
        }
    }

    pub fn midpoint(&self, o: &Real) -> Real {
        self.add(o).mul(&Real::ratio(1, 2))
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Real {}

impl PartialOrd for Real {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Real {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Real::Exact(a), Real::Exact(b)) => {
                if a.is_rational() && b.is_rational() {
                    // Correctly rounded approximations that differ in more
                    // than the last few bits already order the exact values.
                    let (x, y) = (a.approx, b.approx);
                    let scale = x.abs().max(y.abs());
                    if scale.is_finite() && scale > 1e-290 && (x - y).abs() > 1e-12 * scale {
                        return x.total_cmp(&y);
                    }
                    return a.rat.cmp(&b.rat);
                }
                if a.rat == b.rat && a.root2 == b.root2 {
                    Ordering::Equal
                } else {
                    a.sub(b).signum()
                }
            }
            _ => self.to_f64().total_cmp(&other.to_f64()),
        }
    }
}

impl From<i64> for Real {
    fn from(n: i64) -> Self {
        Real::int(n)
    }
}

fn fmt_rational(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        write!(f, "{}", q.numer())
    } else {
        write!(f, "{}/{}", q.numer(), q.denom())
    }
}

impl fmt::Display for Real {
    /// Exact values print as `p/q`, `p/q*sqrt2` or `p/q+r/s*sqrt2`; the
    /// output parses back with [`Real::from_str`].
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Real::Approx(v) => write!(f, "~{v:e}"),
            Real::Exact(s) => {
                if s.root2.is_zero() {
                    fmt_rational(&s.rat, f)
                } else {
                    if !s.rat.is_zero() {
                        fmt_rational(&s.rat, f)?;
                        if s.root2.is_positive() {
                            write!(f, "+")?;
                        }
                    }
                    fmt_rational(&s.root2, f)?;
                    write!(f, "*sqrt2")
                }
            }
        }
    }
}

fn parse_rational(t: &str) -> Result<BigRational, NumError> {
    let err = || NumError::Parse(t.to_string());
    let t = t.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| err())?;
        let d: BigInt = d.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    if let Ok(n) = t.parse::<BigInt>() {
        return Ok(BigRational::from_integer(n));
    }
    parse_decimal(t).ok_or_else(err)
}

/// Decimal literals such as `-0.25` or `1e-3` parse to the exact rational
/// they spell, not to the nearest binary float.
pub(crate) fn parse_decimal(t: &str) -> Option<BigRational> {
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse().ok()?;
    let digits = digits / BigInt::from(10);
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let q = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    Some(if neg { -q } else { q })
}

impl FromStr for Real {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if let Some(v) = t.strip_prefix('~') {
            let v: f64 = v.parse().map_err(|_| NumError::Parse(s.to_string()))?;
            return Real::approx(v);
        }
        if let Some(body) = t.strip_suffix("*sqrt2") {
            // split "a+b" or "a-b" at the last sign that is not leading or an exponent sign
            let bytes = body.as_bytes();
            let split = (1..bytes.len()).rev().find(|&i| {
                (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E')
            });
            return match split {
                Some(i) => {
                    let rat = parse_rational(&body[..i])?;
                    let root2 = parse_rational(body[i..].trim_start_matches('+'))?;
                    Ok(Real::surd(rat, root2))
                }
                None => Ok(Real::root2_multiple(parse_rational(body)?)),
            };
        }
        parse_rational(t).map(Real::from_rational)
    }
}

serde_via_string!(Real, "real");
serde_via_string!(ExtendedReal, "extended real");

/// `ℝ ∪ {±∞}` with `−∞ < r < +∞`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExtendedReal {
    NegInf,
    Finite(Real),
    PosInf,
}

impl ExtendedReal {
    pub fn finite(r: Real) -> Self {
        ExtendedReal::Finite(r)
    }

    pub fn zero() -> Self {
        ExtendedReal::Finite(Real::zero())
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, ExtendedReal::Finite(_))
    }

    pub fn as_real(&self) -> Option<&Real> {
        match self {
            ExtendedReal::Finite(r) => Some(r),
            _ => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            ExtendedReal::NegInf => f64::NEG_INFINITY,
            ExtendedReal::Finite(r) => r.to_f64(),
            ExtendedReal::PosInf => f64::INFINITY,
        }
    }

    /// Maps `±inf` floats to the infinities; NaN is rejected.
    pub fn from_f64(v: f64) -> Result<Self, NumError> {
        if v == f64::INFINITY {
            Ok(ExtendedReal::PosInf)
        } else if v == f64::NEG_INFINITY {
            Ok(ExtendedReal::NegInf)
        } else {
            Real::approx(v).map(ExtendedReal::Finite)
        }
    }

    pub fn neg(&self) -> Self {
        match self {
            ExtendedReal::NegInf => ExtendedReal::PosInf,
            ExtendedReal::Finite(r) => ExtendedReal::Finite(r.neg()),
            ExtendedReal::PosInf => ExtendedReal::NegInf,
        }
    }

    pub fn add(&self, o: &Self) -> Result<Self, NumError> {
        use ExtendedReal::*;
        match (self, o) {
            (Finite(a), Finite(b)) => Ok(Finite(a.add(b))),
            (PosInf, NegInf) | (NegInf, PosInf) => Err(NumError::InfMinusInf),
            (PosInf, _) | (_, PosInf) => Ok(PosInf),
            (NegInf, _) | (_, NegInf) => Ok(NegInf),
        }
    }

    pub fn sub(&self, o: &Self) -> Result<Self, NumError> {
        self.add(&o.neg())
    }

    pub fn min(self, o: Self) -> Self {
        std::cmp::min(self, o)
    }

    pub fn max(self, o: Self) -> Self {
        std::cmp::max(self, o)
    }
}

impl From<Real> for ExtendedReal {
    fn from(r: Real) -> Self {
        ExtendedReal::Finite(r)
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::NegInf => write!(f, "-inf"),
            ExtendedReal::Finite(r) => write!(f, "{r}"),
            ExtendedReal::PosInf => write!(f, "+inf"),
        }
    }
}

impl FromStr for ExtendedReal {
    type Err = NumError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtendedReal::PosInf),
            "-inf" => Ok(ExtendedReal::NegInf),
            t => t.parse().map(ExtendedReal::Finite),
        }
    }
}

/// Infimum of a sequence with `inf ∅ = +∞`.
pub fn infimum<I: IntoIterator<Item = ExtendedReal>>(it: I) -> ExtendedReal {
    it.into_iter().fold(ExtendedReal::PosInf, ExtendedReal::min)
}

/// Supremum of a sequence with `sup ∅ = −∞`.
pub fn supremum<I: IntoIterator<Item = ExtendedReal>>(it: I) -> ExtendedReal {
    it.into_iter().fold(ExtendedReal::NegInf, ExtendedReal::max)
}
