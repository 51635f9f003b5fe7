//! Feasible-set expressions `Φ(x)`.

use std::fmt;

use crate::expr::{EvalError, Expr, ParseError, Parser, Pred, Tok, Env};
use crate::numeric::{ExtendedReal, Real};
use crate::sets::{normalize, Interval, IntervalSet, SetError};

#[derive(Clone, Debug, PartialEq)]
pub enum SetExpr {
    /// Interval with endpoint expressions of `x`; `±inf` endpoints give rays.
    Interval {
        lo: Expr,
        lo_closed: bool,
        hi: Expr,
        hi_closed: bool,
    },
    /// Finite set `{e1, ..., en}`; `{}` is the empty set.
    Points(Vec<Expr>),
    Union(Vec<SetExpr>),
    /// `ray(a, +inf, closed)` is `[a, +inf)`; the flag applies to `a`.
    Ray { from: Expr, up: bool, closed: bool },
    Cond(Pred, Box<SetExpr>, Box<SetExpr>),
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SetEvalError {
    #[error("endpoint expression: {0}")]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Set(#[from] SetError),
}

impl SetExpr {
    /// Evaluates `Φ(x)`; the `y` variable is bound to `x` and never read by
    /// well-formed set expressions.
    pub fn eval(&self, x: &Real) -> Result<IntervalSet, SetEvalError> {
        self.eval_env(&Env::new(x, x))
    }

    pub fn eval_env(&self, env: &Env<'_>) -> Result<IntervalSet, SetEvalError> {
        Ok(match self {
            SetExpr::Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            } => {
                let lo_v = lo.eval(env)?;
                let hi_v = hi.eval(env)?;
                IntervalSet::from_interval(Interval::new(lo_v, *lo_closed, hi_v, *hi_closed)?)
            }
            SetExpr::Points(es) => {
                let mut pieces = Vec::with_capacity(es.len());
                for e in es {
                    pieces.push(Interval::point(e.eval_point(env)?));
                }
                normalize(pieces)
            }
            SetExpr::Union(parts) => {
                let mut acc = IntervalSet::empty();
                for p in parts {
                    acc = acc.union(&p.eval_env(env)?);
                }
                acc
            }
            SetExpr::Ray { from, up, closed } => {
                let a: ExtendedReal = from.eval_point(env)?.into();
                let piece = if *up {
                    Interval::new(a, *closed, ExtendedReal::PosInf, false)?
                } else {
                    Interval::new(ExtendedReal::NegInf, false, a, *closed)?
                };
                IntervalSet::from_interval(piece)
            }
            SetExpr::Cond(p, t, e) => {
                if p.eval(env)? {
                    t.eval_env(env)?
                } else {
                    e.eval_env(env)?
                }
            }
        })
    }

    pub fn mentions_rationality(&self) -> bool {
        match self {
            SetExpr::Interval { lo, hi, .. } => lo.mentions_rationality() || hi.mentions_rationality(),
            SetExpr::Points(es) => es.iter().any(Expr::mentions_rationality),
            SetExpr::Union(ps) => ps.iter().any(SetExpr::mentions_rationality),
            SetExpr::Ray { from, .. } => from.mentions_rationality(),
            SetExpr::Cond(p, t, e) => {
                p.mentions_rationality() || t.mentions_rationality() || e.mentions_rationality()
            }
        }
    }
}

impl fmt::Display for SetExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetExpr::Interval {
                lo,
                lo_closed,
                hi,
                hi_closed,
            } => write!(
                f,
                "{}{}, {}{}",
                if *lo_closed { '[' } else { '(' },
                lo,
                hi,
                if *hi_closed { ']' } else { ')' }
            ),
            SetExpr::Points(es) => {
                write!(f, "{{")?;
                for (i, e) in es.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{e}")?;
                }
                write!(f, "}}")
            }
            SetExpr::Union(ps) => {
                write!(f, "union(")?;
                for (i, p) in ps.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, ")")
            }
            SetExpr::Ray { from, up, closed } => write!(
                f,
                "ray({from}, {}, {})",
                if *up { "+inf" } else { "-inf" },
                if *closed { "closed" } else { "open" }
            ),
            SetExpr::Cond(p, t, e) => write!(f, "if {p} then {t} else {e}"),
        }
    }
}

impl Parser {
    fn set_expr(&mut self) -> Result<SetExpr, ParseError> {
        match self.peek().clone() {
            Tok::LBracket | Tok::LParen => {
                let lo_closed = self.bump() == Tok::LBracket;
                let lo = self.expr()?;
                self.expect(Tok::Comma)?;
                let hi = self.expr()?;
                let hi_closed = match self.bump() {
                    Tok::RBracket => true,
                    Tok::RParen => false,
                    other => return Err(self.error(format!("expected `]` or `)`, found {other:?}"))),
                };
                Ok(SetExpr::Interval {
                    lo,
                    lo_closed,
                    hi,
                    hi_closed,
                })
            }
            Tok::LBrace => {
                self.bump();
                let mut es = Vec::new();
                if *self.peek() != Tok::RBrace {
                    es.push(self.expr()?);
                    while *self.peek() == Tok::Comma {
                        self.bump();
                        es.push(self.expr()?);
                    }
                }
                self.expect(Tok::RBrace)?;
                Ok(SetExpr::Points(es))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "union" => {
                        self.expect(Tok::LParen)?;
                        let mut ps = vec![self.set_expr()?];
                        while *self.peek() == Tok::Comma {
                            self.bump();
                            ps.push(self.set_expr()?);
                        }
                        self.expect(Tok::RParen)?;
                        Ok(SetExpr::Union(ps))
                    }
                    "ray" => {
                        self.expect(Tok::LParen)?;
                        let from = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let up = match self.bump() {
                            Tok::Plus => true,
                            Tok::Minus => false,
                            other => return Err(self.error(format!("expected `+inf` or `-inf`, found {other:?}"))),
                        };
                        match self.bump() {
                            Tok::Ident(s) if s == "inf" => {}
                            other => return Err(self.error(format!("expected `inf`, found {other:?}"))),
                        }
                        self.expect(Tok::Comma)?;
                        let closed = match self.bump() {
                            Tok::Ident(s) if s == "closed" => true,
                            Tok::Ident(s) if s == "open" => false,
                            other => return Err(self.error(format!("expected `open` or `closed`, found {other:?}"))),
                        };
                        self.expect(Tok::RParen)?;
                        Ok(SetExpr::Ray { from, up, closed })
                    }
                    "reals" => Ok(SetExpr::Interval {
                        lo: Expr::PosInf.negate(),
                        lo_closed: false,
                        hi: Expr::PosInf,
                        hi_closed: false,
                    }),
                    "if" => {
                        let p = self.pred()?;
                        match self.bump() {
                            Tok::Ident(s) if s == "then" => {}
                            other => return Err(self.error(format!("expected `then`, found {other:?}"))),
                        }
                        let t = self.set_expr()?;
                        match self.bump() {
                            Tok::Ident(s) if s == "else" => {}
                            other => return Err(self.error(format!("expected `else`, found {other:?}"))),
                        }
                        let e = self.set_expr()?;
                        Ok(SetExpr::Cond(p, Box::new(t), Box::new(e)))
                    }
                    _ => Err(self.unknown(&name)),
                }
            }
            other => Err(self.error(format!("expected a set expression, found {other:?}"))),
        }
    }
}


pub fn parse_set_expr(text: &str) -> Result<SetExpr, ParseError> {
    let mut p = Parser::new(text)?;
    let s = p.set_expr()?;
    p.finish()?;
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn at(src: &str, x: Real) -> IntervalSet {
        parse_set_expr(src).unwrap().eval(&x).unwrap()
    }

    #[test]
    fn conditional_reciprocal() {
        let s = "if x > 0 then {1/x} else {0}";
        assert_eq!(at(s, Real::ratio(1, 4)), IntervalSet::point(Real::int(4)));
        assert_eq!(at(s, Real::zero()), IntervalSet::point(Real::zero()));
    }

    #[test]
    fn half_open_constant() {
        let s = at("[-1, 0)", Real::ratio(1, 2));
        assert_eq!(s.to_string(), "[-1,0)");
    }

    #[test]
    fn indicator_points() {
        let s = "{0, -I{x == 0}}";
        assert_eq!(
            at(s, Real::zero()),
            IntervalSet::point(Real::int(-1)).union(&IntervalSet::point(Real::zero()))
        );
        assert_eq!(at(s, Real::ratio(1, 2)), IntervalSet::point(Real::zero()));
    }

    #[test]
    fn rays_and_reals() {
        assert_eq!(at("reals", Real::zero()), IntervalSet::whole_line());
        assert_eq!(at("(-inf, inf)", Real::zero()), IntervalSet::whole_line());
        let r = at("ray(x, +inf, closed)", Real::int(2));
        assert!(r.member(&Real::int(2)) && !r.is_bounded());
        let u = at("union([0,1], (1, 2), ray(5, -inf, open))", Real::zero());
        assert_eq!(u.pieces().len(), 1);
    }

    #[test]
    fn branch_errors_only_when_taken() {
        let s = parse_set_expr("if x > 0 then {1/x} else {0}").unwrap();
        assert!(s.eval(&Real::zero()).is_ok());
        let bad = parse_set_expr("{1/x}").unwrap();
        assert!(matches!(bad.eval(&Real::zero()), Err(SetEvalError::Eval(EvalError::DivisionByZero))));
        let inverted = parse_set_expr("[1, x]").unwrap();
        assert!(matches!(inverted.eval(&Real::zero()), Err(SetEvalError::Set(_))));
    }

    #[test]
    fn round_trip() {
        for src in [
            "if x > 0 then {1/x} else {0}",
            "union([x - 0.5, x + 0.5], ray(3, +inf, open), {})",
            "if x < 0 then if x < -1 then {x} else (x, 1] else [0, 2]",
            "if not(is_rat(x)) then reals else [0, 2]",
        ] {
            let s = parse_set_expr(src).unwrap();
            assert_eq!(parse_set_expr(&s.to_string()).unwrap(), s, "{src}");
        }
    }
}
