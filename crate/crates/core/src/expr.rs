//! Cost-expression language: lexer, recursive-descent parser, printer and
//! evaluator for `u(x, y)`.
//!
//! The grammar is published in `docs/grammar.txt`. Printing is canonical and
//! `parse_expr(&ast.to_string())` returns the same tree.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::numeric::{parse_decimal, ExtendedReal, NumError, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: unknown identifier `{name}`")]
    UnknownIdent { line: usize, col: usize, name: String },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("undefined arithmetic on infinities")]
    Indeterminate,
    #[error("is_rat applied to an approximate value")]
    UnknownRationality,
    #[error("infinite endpoint expression where a point was required")]
    InfinitePoint,
    #[error("numeric error: {0}")]
    Num(NumError),
}

impl From<NumError> for EvalError {
    fn from(e: NumError) -> Self {
        match e {
            NumError::DivisionByZero => EvalError::DivisionByZero,
            NumError::InfMinusInf => EvalError::Indeterminate,
            NumError::UnknownRationality => EvalError::UnknownRationality,
            other => EvalError::Num(other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Lt,
    Le,
    Gt,
    Ge,
    Eq,
    Ne,
}

impl CmpOp {
    fn symbol(self) -> &'static str {
        match self {
            CmpOp::Lt => "<",
            CmpOp::Le => "<=",
            CmpOp::Gt => ">",
            CmpOp::Ge => ">=",
            CmpOp::Eq => "==",
            CmpOp::Ne => "!=",
        }
    }

    fn holds(self, a: &ExtendedReal, b: &ExtendedReal) -> bool {
        match self {
            CmpOp::Lt => a < b,
            CmpOp::Le => a <= b,
            CmpOp::Gt => a > b,
            CmpOp::Ge => a >= b,
            CmpOp::Eq => a == b,
            CmpOp::Ne => a != b,
        }
    }
}

/// Expression tree over `x`, `y` and exact constants.
#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(BigRational),
    Sqrt2,
    PosInf,
    Var(Var),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Abs(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
    Indicator(Box<Pred>),
    Piecewise(Box<Pred>, Box<Expr>, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum Pred {
    Cmp(CmpOp, Expr, Expr),
    IsRational(Expr),
    Not(Box<Pred>),
    And(Box<Pred>, Box<Pred>),
    Or(Box<Pred>, Box<Pred>),
}

/// Evaluation environment: the point `(x, y)` and the rationality mode.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a> {
    pub x: &'a Real,
    pub y: &'a Real,
    /// Treat approximate values as irrational in `is_rat` instead of erroring.
    pub float_is_irrational: bool,
}

impl<'a> Env<'a> {
    pub fn new(x: &'a Real, y: &'a Real) -> Self {
        Env {
            x,
            y,
            float_is_irrational: false,
        }
    }
}

fn ext_mul(a: &ExtendedReal, b: &ExtendedReal) -> Result<ExtendedReal, EvalError> {
    use ExtendedReal::*;
    match (a, b) {
        (Finite(p), Finite(q)) => Ok(Finite(p.mul(q))),
        (Finite(p), inf) | (inf, Finite(p)) => match p.signum() {
            std::cmp::Ordering::Equal => Err(EvalError::Indeterminate),
            std::cmp::Ordering::Greater => Ok(inf.clone()),
            std::cmp::Ordering::Less => Ok(inf.neg()),
        },
        (p, q) => Ok(if p == q { PosInf } else { NegInf }),
    }
}

fn ext_div(a: &ExtendedReal, b: &ExtendedReal) -> Result<ExtendedReal, EvalError> {
    use ExtendedReal::*;
    match (a, b) {
        (Finite(p), Finite(q)) => Ok(Finite(p.div(q)?)),
        (Finite(_), _) => Ok(ExtendedReal::zero()),
        (_, Finite(q)) => match q.signum() {
            std::cmp::Ordering::Equal => Err(EvalError::DivisionByZero),
            std::cmp::Ordering::Greater => Ok(a.clone()),
            std::cmp::Ordering::Less => Ok(a.neg()),
        },
        _ => Err(EvalError::Indeterminate),
    }
}

impl Expr {
    pub fn constant(q: BigRational) -> Expr {
        Expr::Const(q)
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(BigRational::from_integer(n.into()))
    }

    pub fn x() -> Expr {
        Expr::Var(Var::X)
    }

    pub fn y() -> Expr {
        Expr::Var(Var::Y)
    }

    pub fn negate(self) -> Expr {
        Expr::Neg(Box::new(self))
    }

    pub fn eval(&self, env: &Env<'_>) -> Result<ExtendedReal, EvalError> {
        Ok(match self {
            Expr::Const(q) => Real::from_rational(q.clone()).into(),
            Expr::Sqrt2 => Real::root2_multiple(BigRational::one()).into(),
            Expr::PosInf => ExtendedReal::PosInf,
            Expr::Var(Var::X) => env.x.clone().into(),
            Expr::Var(Var::Y) => env.y.clone().into(),
            Expr::Neg(e) => e.eval(env)?.neg(),
            Expr::Bin(op, a, b) => {
                let a = a.eval(env)?;
                let b = b.eval(env)?;
                match op {
                    BinOp::Add => a.add(&b)?,
                    BinOp::Sub => a.sub(&b)?,
                    BinOp::Mul => ext_mul(&a, &b)?,
                    BinOp::Div => ext_div(&a, &b)?,
                }
            }
            Expr::Abs(e) => {
                let v = e.eval(env)?;
                if v < ExtendedReal::zero() {
                    v.neg()
                } else {
                    v
                }
            }
            Expr::Min(a, b) => a.eval(env)?.min(b.eval(env)?),
            Expr::Max(a, b) => a.eval(env)?.max(b.eval(env)?),
            Expr::Indicator(p) => {
                if p.eval(env)? {
                    Real::one().into()
                } else {
                    Real::zero().into()
                }
            }
            Expr::Piecewise(p, t, e) => {
                if p.eval(env)? {
                    t.eval(env)?
                } else {
                    e.eval(env)?
                }
            }
        })
    }

    /// Evaluates to a finite point, rejecting infinities.
    pub fn eval_point(&self, env: &Env<'_>) -> Result<Real, EvalError> {
        match self.eval(env)? {
            ExtendedReal::Finite(r) => Ok(r),
            _ => Err(EvalError::InfinitePoint),
        }
    }

    pub fn mentions_rationality(&self) -> bool {
        let mut found = false;
        self.visit(&mut |e| {
            if let Expr::Indicator(p) | Expr::Piecewise(p, _, _) = e {
                found |= p.mentions_rationality();
            }
        });
        found
    }

    pub fn mentions(&self, v: Var) -> bool {
        let mut found = false;
        self.visit(&mut |e| found |= *e == Expr::Var(v));
        found
    }

    fn visit(&self, f: &mut dyn FnMut(&Expr)) {
        f(self);
        match self {
            Expr::Neg(e) | Expr::Abs(e) => e.visit(f),
            Expr::Bin(_, a, b) | Expr::Min(a, b) | Expr::Max(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Expr::Indicator(p) => p.visit_exprs(f),
            Expr::Piecewise(p, a, b) => {
                p.visit_exprs(f);
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Sqrt2 | Expr::PosInf | Expr::Var(_) => 1,
            Expr::Neg(e) | Expr::Abs(e) => 1 + e.depth(),
            Expr::Bin(_, a, b) | Expr::Min(a, b) | Expr::Max(a, b) => 1 + a.depth().max(b.depth()),
            Expr::Indicator(p) => 1 + p.depth(),
            Expr::Piecewise(p, a, b) => 1 + p.depth().max(a.depth()).max(b.depth()),
        }
    }
}

impl Pred {
    pub fn eval(&self, env: &Env<'_>) -> Result<bool, EvalError> {
        Ok(match self {
            Pred::Cmp(op, a, b) => op.holds(&a.eval(env)?, &b.eval(env)?),
            Pred::IsRational(e) => match e.eval(env)? {
                ExtendedReal::Finite(r) => r.is_rational(env.float_is_irrational)?,
                _ => false,
            },
            Pred::Not(p) => !p.eval(env)?,
            Pred::And(a, b) => a.eval(env)? && b.eval(env)?,
            Pred::Or(a, b) => a.eval(env)? || b.eval(env)?,
        })
    }

    pub fn mentions_rationality(&self) -> bool {
        match self {
            Pred::IsRational(_) => true,
            Pred::Cmp(_, a, b) => a.mentions_rationality() || b.mentions_rationality(),
            Pred::Not(p) => p.mentions_rationality(),
            Pred::And(a, b) | Pred::Or(a, b) => a.mentions_rationality() || b.mentions_rationality(),
        }
    }

    fn visit_exprs(&self, f: &mut dyn FnMut(&Expr)) {
        match self {
            Pred::Cmp(_, a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Pred::IsRational(e) => e.visit(f),
            Pred::Not(p) => p.visit_exprs(f),
            Pred::And(a, b) | Pred::Or(a, b) => {
                a.visit_exprs(f);
                b.visit_exprs(f);
            }
        }
    }

    fn depth(&self) -> usize {
        match self {
            Pred::Cmp(_, a, b) => 1 + a.depth().max(b.depth()),
            Pred::IsRational(e) => 1 + e.depth(),
            Pred::Not(p) => 1 + p.depth(),
            Pred::And(a, b) | Pred::Or(a, b) => 1 + a.depth().max(b.depth()),
        }
    }
}

// ---------------------------------------------------------------- printing

fn is_terminating(q: &BigRational) -> bool {
    let mut d = q.denom().clone();
    for p in [2u32, 5] {
        let p = BigInt::from(p);
        while (&d % &p).is_zero() {
            d /= &p;
        }
    }
    d.is_one()
}

fn fmt_const(q: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if q.denom().is_one() {
        return write!(f, "{}", q.numer());
    }
    if is_terminating(q) {
        // exact decimal expansion
        let neg = q.is_negative();
        let a = q.abs();
        let int = a.numer() / a.denom();
        let mut rem = a.numer() % a.denom();
        let mut digits = String::new();
        while !rem.is_zero() {
            rem *= 10;
            digits.push_str(&(&rem / a.denom()).to_string());
            rem %= a.denom();
        }
        return write!(f, "{}{}.{}", if neg { "-" } else { "" }, int, digits);
    }
    write!(f, "rat({},{})", q.numer(), q.denom())
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(q) => fmt_const(q, f),
            Expr::Sqrt2 => write!(f, "sqrt2"),
            Expr::PosInf => write!(f, "inf"),
            Expr::Var(Var::X) => write!(f, "x"),
            Expr::Var(Var::Y) => write!(f, "y"),
            Expr::Neg(e) => write!(f, "-({e})"),
            Expr::Bin(op, a, b) => {
                let s = match op {
                    BinOp::Add => "+",
                    BinOp::Sub => "-",
                    BinOp::Mul => "*",
                    BinOp::Div => "/",
                };
                write!(f, "({a} {s} {b})")
            }
            Expr::Abs(e) => write!(f, "abs({e})"),
            Expr::Min(a, b) => write!(f, "min({a}, {b})"),
            Expr::Max(a, b) => write!(f, "max({a}, {b})"),
            Expr::Indicator(p) => write!(f, "I{{{p}}}"),
            Expr::Piecewise(p, a, b) => write!(f, "piecewise({p}, {a}, {b})"),
        }
    }
}

impl fmt::Display for Pred {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Pred::Cmp(op, a, b) => write!(f, "{a} {} {b}", op.symbol()),
            Pred::IsRational(e) => write!(f, "is_rat({e})"),
            Pred::Not(p) => write!(f, "not({p})"),
            Pred::And(a, b) => write!(f, "and({a}, {b})"),
            Pred::Or(a, b) => write!(f, "or({a}, {b})"),
        }
    }
}

// ----------------------------------------------------------------- lexing

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Num(String),
    Ident(String),
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Plus,
    Minus,
    Star,
    Slash,
    Cmp(CmpOp),
    Eof,
}

#[derive(Clone, Debug)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src
        .chars()
        .map(|c| match c {
            '−' => '-',
            '×' | '·' => '*',
            '÷' => '/',
            c => c,
        })
        .collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let mut push = |tok: Tok, len: usize, i: &mut usize, col: &mut usize| {
            out.push(Token { tok, line: tl, col: tc });
            *i += len;
            *col += len;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                i += 1;
                col += 1;
            }
            '(' => push(Tok::LParen, 1, &mut i, &mut col),
            ')' => push(Tok::RParen, 1, &mut i, &mut col),
            '[' => push(Tok::LBracket, 1, &mut i, &mut col),
            ']' => push(Tok::RBracket, 1, &mut i, &mut col),
            '{' => push(Tok::LBrace, 1, &mut i, &mut col),
            '}' => push(Tok::RBrace, 1, &mut i, &mut col),
            ',' => push(Tok::Comma, 1, &mut i, &mut col),
            '+' => push(Tok::Plus, 1, &mut i, &mut col),
            '-' => push(Tok::Minus, 1, &mut i, &mut col),
            '*' => push(Tok::Star, 1, &mut i, &mut col),
            '/' => push(Tok::Slash, 1, &mut i, &mut col),
            '<' | '>' | '=' | '!' | '≤' | '≥' | '≠' => {
                let next = chars.get(i + 1).copied();
                let (op, len) = match (c, next) {
                    ('<', Some('=')) => (CmpOp::Le, 2),
                    ('>', Some('=')) => (CmpOp::Ge, 2),
                    ('=', Some('=')) => (CmpOp::Eq, 2),
                    ('!', Some('=')) => (CmpOp::Ne, 2),
                    ('<', _) => (CmpOp::Lt, 1),
                    ('>', _) => (CmpOp::Gt, 1),
                    ('=', _) => (CmpOp::Eq, 1),
                    ('≤', _) => (CmpOp::Le, 1),
                    ('≥', _) => (CmpOp::Ge, 1),
                    ('≠', _) => (CmpOp::Ne, 1),
                    _ => {
                        return Err(ParseError::Syntax {
                            line,
                            col,
                            msg: format!("unexpected character `{c}`"),
                        })
                    }
                };
                push(Tok::Cmp(op), len, &mut i, &mut col);
            }
            c if c.is_ascii_digit() || c == '.' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_ascii_digit() || chars[j] == '.') {
                    j += 1;
                }
                if j < chars.len() && (chars[j] == 'e' || chars[j] == 'E') {
                    let mut k = j + 1;
                    if k < chars.len() && (chars[k] == '+' || chars[k] == '-') {
                        k += 1;
                    }
                    if k < chars.len() && chars[k].is_ascii_digit() {
                        while k < chars.len() && chars[k].is_ascii_digit() {
                            k += 1;
                        }
                        j = k;
                    }
                }
                let text: String = chars[start..j].iter().collect();
                push(Tok::Num(text), j - start, &mut i, &mut col);
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                let mut j = i;
                while j < chars.len() && (chars[j].is_alphanumeric() || chars[j] == '_') {
                    j += 1;
                }
                let text: String = chars[start..j].iter().collect();
                push(Tok::Ident(text), j - start, &mut i, &mut col);
            }
            c => {
                return Err(ParseError::Syntax {
                    line,
                    col,
                    msg: format!("unexpected character `{c}`"),
                })
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

// ---------------------------------------------------------------- parsing

pub(crate) struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    pub(crate) fn new(src: &str) -> Result<Self, ParseError> {
        Ok(Parser { toks: lex(src)?, pos: 0 })
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub(crate) fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    pub(crate) fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, msg: impl Into<String>) -> ParseError {
        let t = &self.toks[self.pos];
        ParseError::Syntax {
            line: t.line,
            col: t.col,
            msg: msg.into(),
        }
    }

    pub(crate) fn unknown(&self, name: &str) -> ParseError {
        let t = &self.toks[self.pos.saturating_sub(1)];
        ParseError::UnknownIdent {
            line: t.line,
            col: t.col,
            name: name.to_string(),
        }
    }

    pub(crate) fn expect(&mut self, want: Tok) -> Result<(), ParseError> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.error(format!("expected {want:?}, found {:?}", self.peek())))
        }
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            Err(self.error(format!("unexpected trailing {:?}", self.peek())))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = match self.peek() {
                Tok::Plus => BinOp::Add,
                Tok::Minus => BinOp::Sub,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.term()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.peek() {
                Tok::Star => BinOp::Mul,
                Tok::Slash => BinOp::Div,
                _ => return Ok(lhs),
            };
            self.bump();
            let rhs = self.unary()?;
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            Tok::Minus => {
                self.bump();
                if let Tok::Num(_) = self.peek() {
                    let q = self.number()?;
                    return Ok(Expr::Const(-q));
                }
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Tok::Plus => {
                self.bump();
                self.unary()
            }
            _ => self.atom(),
        }
    }

    fn number(&mut self) -> Result<BigRational, ParseError> {
        match self.bump() {
            Tok::Num(t) => parse_decimal(&t).ok_or_else(|| self.error(format!("bad number `{t}`"))),
            other => Err(self.error(format!("expected number, found {other:?}"))),
        }
    }

    fn integer(&mut self) -> Result<BigInt, ParseError> {
        let neg = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let q = self.number()?;
        if !q.denom().is_one() {
            return Err(self.error("expected integer"));
        }
        Ok(if neg { -q.numer().clone() } else { q.numer().clone() })
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().clone() {
            Tok::Num(_) => Ok(Expr::Const(self.number()?)),
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::x()),
                    "y" => Ok(Expr::y()),
                    "sqrt2" => Ok(Expr::Sqrt2),
                    "inf" => Ok(Expr::PosInf),
                    "abs" => {
                        self.expect(Tok::LParen)?;
                        let e = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Abs(Box::new(e)))
                    }
                    "min" | "max" => {
                        self.expect(Tok::LParen)?;
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let b = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(if name == "min" {
                            Expr::Min(Box::new(a), Box::new(b))
                        } else {
                            Expr::Max(Box::new(a), Box::new(b))
                        })
                    }
                    "rat" => {
                        self.expect(Tok::LParen)?;
                        let n = self.integer()?;
                        self.expect(Tok::Comma)?;
                        let d = self.integer()?;
                        self.expect(Tok::RParen)?;
                        if d.is_zero() {
                            return Err(self.error("zero denominator"));
                        }
                        Ok(Expr::Const(BigRational::new(n, d)))
                    }
                    "I" => {
                        self.expect(Tok::LBrace)?;
                        let p = self.pred()?;
                        self.expect(Tok::RBrace)?;
                        Ok(Expr::Indicator(Box::new(p)))
                    }
                    "piecewise" => {
                        self.expect(Tok::LParen)?;
                        let p = self.pred()?;
                        self.expect(Tok::Comma)?;
                        let a = self.expr()?;
                        self.expect(Tok::Comma)?;
                        let b = self.expr()?;
                        self.expect(Tok::RParen)?;
                        Ok(Expr::Piecewise(Box::new(p), Box::new(a), Box::new(b)))
                    }
                    _ => Err(self.unknown(&name)),
                }
            }
            other => Err(self.error(format!("unexpected {other:?}"))),
        }
    }

    pub(crate) fn pred(&mut self) -> Result<Pred, ParseError> {
        if let Tok::Ident(name) = self.peek().clone() {
            if *self.peek_at(1) == Tok::LParen {
                match name.as_str() {
                    "is_rat" | "is_rational" => {
                        self.bump();
                        self.bump();
                        let e = self.expr()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Pred::IsRational(e));
                    }
                    "not" => {
                        self.bump();
                        self.bump();
                        let p = self.pred()?;
                        self.expect(Tok::RParen)?;
                        return Ok(Pred::Not(Box::new(p)));
                    }
                    "and" | "or" => {
                        self.bump();
                        self.bump();
                        let a = self.pred()?;
                        self.expect(Tok::Comma)?;
                        let b = self.pred()?;
                        self.expect(Tok::RParen)?;
                        return Ok(if name == "and" {
                            Pred::And(Box::new(a), Box::new(b))
                        } else {
                            Pred::Or(Box::new(a), Box::new(b))
                        });
                    }
                    _ => {}
                }
            }
        }
        let a = self.expr()?;
        let op = match self.bump() {
            Tok::Cmp(op) => op,
            other => return Err(self.error(format!("expected comparison, found {other:?}"))),
        };
        let b = self.expr()?;
        Ok(Pred::Cmp(op, a, b))
    }
}

pub fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

pub fn parse_pred(text: &str) -> Result<Pred, ParseError> {
    let mut p = Parser::new(text)?;
    let e = p.pred()?;
    p.finish()?;
    Ok(e)
}

impl std::str::FromStr for Expr {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_expr(s)
    }
}

serde_via_string!(Expr, "expression");

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_at(src: &str, x: Real, y: Real) -> ExtendedReal {
        parse_expr(src).unwrap().eval(&Env::new(&x, &y)).unwrap()
    }

    #[test]
    fn corpus_costs_parse() {
        let e = parse_expr("min(abs(x−y),1)").unwrap();
        assert_eq!(
            e,
            Expr::Min(
                Box::new(Expr::Abs(Box::new(Expr::Bin(BinOp::Sub, Box::new(Expr::x()), Box::new(Expr::y()))))),
                Box::new(Expr::int(1))
            )
        );
        let e = parse_expr("y*I{x>0}").unwrap();
        assert!(matches!(e, Expr::Bin(BinOp::Mul, _, _)));
        let e = parse_expr("−x*I{is_rat(x)}").unwrap();
        assert!(e.mentions_rationality());
    }

    #[test]
    fn rational_indicator_reads_the_tag() {
        let third = Real::ratio(1, 3);
        assert_eq!(
            eval_at("-x*I{is_rat(x)}", third.clone(), third),
            ExtendedReal::Finite(Real::ratio(-1, 3))
        );
        let irr = Real::root2_multiple(BigRational::new(1.into(), 2.into()));
        assert_eq!(eval_at("-x*I{is_rat(x)}", irr.clone(), irr), ExtendedReal::zero());
        assert_eq!(eval_at("I{x != 0}", Real::zero(), Real::zero()), ExtendedReal::zero());
    }

    #[test]
    fn approximate_rationality_is_an_error_unless_opted_in() {
        let x = Real::approx(0.3).unwrap();
        let e = parse_expr("I{is_rat(x)}").unwrap();
        assert_eq!(e.eval(&Env::new(&x, &x)), Err(EvalError::UnknownRationality));
        let env = Env { x: &x, y: &x, float_is_irrational: true };
        assert_eq!(e.eval(&env), Ok(ExtendedReal::zero()));
    }

    #[test]
    fn division_by_zero_is_reported() {
        let e = parse_expr("1/x").unwrap();
        assert_eq!(e.eval(&Env::new(&Real::zero(), &Real::zero())), Err(EvalError::DivisionByZero));
    }

    #[test]
    fn parse_errors_carry_positions() {
        match parse_expr("x +\n  foo(1)") {
            Err(ParseError::UnknownIdent { line, name, .. }) => {
                assert_eq!(line, 2);
                assert_eq!(name, "foo");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_expr("x + "), Err(ParseError::Syntax { .. })));
        assert!(matches!(parse_expr("(x"), Err(ParseError::Syntax { .. })));
    }

    #[test]
    fn printer_round_trips() {
        for src in [
            "min(abs(x-y),1)",
            "-x*I{is_rat(x)}",
            "piecewise(and(x > 0, not(y <= 1/3)), y / x, -2.5)",
            "rat(1,3) * x - -(y)",
            "I{or(x == 0, is_rat(y))} + sqrt2 * inf",
        ] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
    }
}
