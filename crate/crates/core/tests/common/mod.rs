//! Shared test support: random problems and an independent brute-force
//! value oracle.
#![allow(dead_code)]

use num_traits::ToPrimitive;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use paramin::expr::{BinOp, CmpOp, Expr, Pred, Var};
use paramin::numeric::{ExtendedReal, Real};
use paramin::problem::{load_problem, Problem};

pub use rand::SeedableRng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A rational in `[-4, 4]` with denominator 4.
pub fn coef(rng: &mut ChaCha8Rng) -> String {
    let n: i64 = rng.gen_range(-16..=16);
    format!("rat({n}, 4)")
}

/// Cost expression text of AST depth at most `depth`; `smooth` leaves out
/// indicators and branches.
pub fn cost_text(rng: &mut ChaCha8Rng, depth: u32, smooth: bool) -> String {
    if depth <= 1 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => "x".into(),
            1 => "y".into(),
            _ => coef(rng),
        };
    }
    let d = depth - 1;
    let kinds = if smooth { 6 } else { 8 };
    match rng.gen_range(0..kinds) {
        0 => format!("({} + {})", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        1 => format!("({} - {})", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        2 => format!("({} * {})", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        3 => format!("abs({})", cost_text(rng, d, smooth)),
        4 => format!("min({}, {})", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        5 => format!("max({}, {})", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        6 => format!("I{{{} < {}}}", cost_text(rng, d, smooth), cost_text(rng, d, smooth)),
        _ => format!(
            "piecewise({} <= {}, {}, {})",
            cost_text(rng, d.min(2), smooth),
            cost_text(rng, d.min(2), smooth),
            cost_text(rng, d, smooth),
            cost_text(rng, d, smooth)
        ),
    }
}

fn affine(rng: &mut ChaCha8Rng) -> String {
    format!("({} * x + {})", coef(rng), coef(rng))
}

fn closed_piece(rng: &mut ChaCha8Rng) -> String {
    let (a, b) = (affine(rng), affine(rng));
    match rng.gen_range(0..4) {
        0 => format!("[min({a}, {b}), max({a}, {b})]"),
        1 => format!("[min({a}, {b}), max({a}, {b}) + rat(1, 2))"),
        2 => format!("(min({a}, {b}) - 1, max({a}, {b})]"),
        _ => format!("{{{a}, {b}}}"),
    }
}

/// A feasible mapping: a piece, or a switch between two pieces at a
/// threshold inside the window.
pub fn phi_text(rng: &mut ChaCha8Rng) -> String {
    if rng.gen_bool(0.5) {
        closed_piece(rng)
    } else {
        let t: i64 = rng.gen_range(-3..=3);
        let op = if rng.gen_bool(0.5) { "<" } else { "<=" };
        format!("if x {op} rat({t}, 4) then {} else {}", closed_piece(rng), closed_piece(rng))
    }
}

/// A compact constant feasible set.
pub fn compact_phi_text(rng: &mut ChaCha8Rng) -> String {
    let (a, b) = (coef(rng), coef(rng));
    match rng.gen_range(0..3) {
        0 => format!("[min({a}, {b}), max({a}, {b})]"),
        1 => format!("{{{a}, {b}}}"),
        _ => format!("union([min({a}, {b}), max({a}, {b})], {{{}}})", coef(rng)),
    }
}

pub fn window_text(rng: &mut ChaCha8Rng) -> &'static str {
    if rng.gen_bool(0.5) {
        "[-1, 1]"
    } else {
        "[0, 1]"
    }
}

pub fn problem_from(name: &str, x_domain: &str, u: &str, phi: &str) -> Problem {
    let doc = format!("name = \"{name}\"\nx_domain = \"{x_domain}\"\ny_domain = \"reals\"\nu = \"{u}\"\nphi = \"{phi}\"\n");
    load_problem(&doc).unwrap_or_else(|e| panic!("{e}\n{doc}")).problem
}

/// A random piecewise problem: cost of depth at most 4 with coefficients
/// in `[-4, 4]`, piecewise-affine feasible intervals.
pub fn random_problem(seed: u64) -> Problem {
    let mut r = rng(seed);
    let x = window_text(&mut r);
    let u = cost_text(&mut r, 4, false);
    let phi = phi_text(&mut r);
    problem_from(&format!("random{seed}"), x, &u, &phi)
}

/// Continuous cost over a constant compact feasible set.
pub fn random_regular_problem(seed: u64) -> Problem {
    let mut r = rng(seed);
    let x = window_text(&mut r);
    let u = cost_text(&mut r, 4, true);
    let phi = compact_phi_text(&mut r);
    problem_from(&format!("regular{seed}"), x, &u, &phi)
}

/// `n` exact points spread over `[a, b]`.
pub fn exact_grid(a: &Real, b: &Real, n: usize) -> Vec<Real> {
    let step = b.sub(a).div(&Real::int(n as i64 - 1)).unwrap();
    (0..n).map(|i| a.add(&step.mul(&Real::int(i as i64)))).collect()
}

/// A float together with what is known about the rationality of the exact
/// value it stands for.
#[derive(Clone, Copy, Debug)]
pub struct Tagged {
    pub v: f64,
    pub rational: Option<bool>,
}

fn tag_of(r: &Real) -> Tagged {
    Tagged {
        v: r.to_f64(),
        rational: if r.is_exact() { Some(r.as_rational().is_some()) } else { None },
    }
}

fn combine(a: Tagged, b: Tagged, v: f64, product: bool) -> Tagged {
    let rational = match (a.rational, b.rational) {
        (Some(true), Some(true)) => Some(true),
        _ if product && (a.v == 0.0 && a.rational == Some(true) || b.v == 0.0 && b.rational == Some(true)) => Some(true),
        (Some(true), Some(false)) | (Some(false), Some(true)) => Some(false),
        _ => None,
    };
    Tagged { v, rational }
}

/// Float evaluation of a cost tree, written independently of the library
/// evaluator.
pub fn eval_float(e: &Expr, x: Tagged, y: Tagged) -> Tagged {
    let exact = |v: f64| Tagged { v, rational: Some(true) };
    match e {
        Expr::Const(q) => exact(q.to_f64().unwrap()),
        Expr::Sqrt2 => Tagged {
            v: std::f64::consts::SQRT_2,
            rational: Some(false),
        },
        Expr::PosInf => Tagged {
            v: f64::INFINITY,
            rational: None,
        },
        Expr::Var(Var::X) => x,
        Expr::Var(Var::Y) => y,
        Expr::Neg(a) => {
            let a = eval_float(a, x, y);
            Tagged { v: -a.v, ..a }
        }
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_float(a, x, y), eval_float(b, x, y));
            match op {
                BinOp::Add => combine(a, b, a.v + b.v, false),
                BinOp::Sub => combine(a, b, a.v - b.v, false),
                BinOp::Mul => combine(a, b, a.v * b.v, true),
                BinOp::Div => combine(a, b, a.v / b.v, true),
            }
        }
        Expr::Abs(a) => {
            let a = eval_float(a, x, y);
            Tagged { v: a.v.abs(), ..a }
        }
        Expr::Min(a, b) => {
            let (a, b) = (eval_float(a, x, y), eval_float(b, x, y));
            if a.v <= b.v {
                a
            } else {
                b
            }
        }
        Expr::Max(a, b) => {
            let (a, b) = (eval_float(a, x, y), eval_float(b, x, y));
            if a.v >= b.v {
                a
            } else {
                b
            }
        }
        Expr::Indicator(p) => exact(if pred_float(p, x, y) { 1.0 } else { 0.0 }),
        Expr::Piecewise(p, a, b) => {
            if pred_float(p, x, y) {
                eval_float(a, x, y)
            } else {
                eval_float(b, x, y)
            }
        }
    }
}

pub fn pred_float(p: &Pred, x: Tagged, y: Tagged) -> bool {
    match p {
        Pred::Cmp(op, a, b) => {
            let (a, b) = (eval_float(a, x, y).v, eval_float(b, x, y).v);
            match op {
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
            }
        }
        Pred::IsRational(e) => eval_float(e, x, y)
            .rational
            .unwrap_or_else(|| panic!("oracle cannot decide rationality of {e}")),
        Pred::Not(a) => !pred_float(a, x, y),
        Pred::And(a, b) => pred_float(a, x, y) && pred_float(b, x, y),
        Pred::Or(a, b) => pred_float(a, x, y) || pred_float(b, x, y),
    }
}

fn finite(e: &ExtendedReal) -> Option<f64> {
    match e {
        ExtendedReal::Finite(r) => Some(r.to_f64()),
        _ => None,
    }
}

/// Brute-force `v(x)`: every piece of `Φ(x)` sampled at `n` uniform points
/// (unbounded pieces on a window of radius 64 around `x` plus far points),
/// closed endpoints evaluated exactly, open endpoints approached within
/// `1e-9`, and the best samples refined by repeated local sampling. A
/// lattice of small-denominator rationals near `x` is evaluated exactly, since
/// a uniform grid cannot see a minimum attained at a single point.
pub fn brute_value(p: &Problem, x: &Real, n: usize) -> f64 {
    let phi = p.phi_at(x).unwrap();
    let xt = tag_of(x);
    let grid_tag = if p.float_is_irrational { Some(false) } else { None };
    let u = |y: Tagged| eval_float(&p.u, xt, y).v;
    let at = |v: f64| Tagged { v, rational: grid_tag };
    let mut best = f64::INFINITY;
    for piece in phi.pieces() {
        let (lo, hi) = (piece.lo(), piece.hi());
        if let (ExtendedReal::Finite(a), ExtendedReal::Finite(b)) = (lo, hi) {
            if a == b {
                best = best.min(u(tag_of(a)));
                continue;
            }
        }
        if piece.lo_closed() {
            if let ExtendedReal::Finite(a) = lo {
                best = best.min(u(tag_of(a)));
            }
        }
        if piece.hi_closed() {
            if let ExtendedReal::Finite(b) = hi {
                best = best.min(u(tag_of(b)));
            }
        }
        let a = finite(lo).unwrap_or(x.to_f64() - 64.0).max(x.to_f64() - 64.0 - 1e9 * f64::from(u8::from(lo.is_finite())));
        let b = finite(hi).unwrap_or(x.to_f64() + 64.0).min(x.to_f64() + 64.0 + 1e9 * f64::from(u8::from(hi.is_finite())));
        let approach = 1e-9f64.min((b - a) / 4.0);
        let mut samples = vec![a + approach, b - approach];
        if !lo.is_finite() {
            samples.extend((7..60).map(|k| -(2f64.powi(k))));
        }
        if !hi.is_finite() {
            samples.extend((7..60).map(|k| 2f64.powi(k)));
        }
        // isolated minimizers sit at rationals with small denominators
        let (la, lb) = (a.max(x.to_f64() - 8.0), b.min(x.to_f64() + 8.0));
        for q in 1..=32i64 {
            for k in (la * q as f64).ceil() as i64..=(lb * q as f64).floor() as i64 {
                let y = Real::from_rational(num_rational::BigRational::new(k.into(), q.into()));
                if phi.member(&y) {
                    best = best.min(p.cost(x, &y).unwrap().to_f64());
                }
            }
        }
        let mut scored: Vec<(f64, f64)> = samples.iter().map(|&y| (u(at(y)), y)).collect();
        let h = (b - a) / n as f64;
        for i in 1..n {
            let y = a + h * i as f64;
            scored.push((u(at(y)), y));
        }
        scored.sort_by(|p, q| p.0.total_cmp(&q.0));
        best = best.min(scored[0].0);
        for &(_, c) in scored.iter().take(3) {
            let mut centre = c;
            let mut radius = h;
            for _ in 0..6 {
                let (l, r) = ((centre - radius).max(a + approach), (centre + radius).min(b - approach));
                let m = 1000;
                let mut local = (f64::INFINITY, centre);
                for i in 0..=m {
                    let y = l + (r - l) * i as f64 / m as f64;
                    let v = u(at(y));
                    if v < local.0 {
                        local = (v, y);
                    }
                }
                best = best.min(local.0);
                centre = local.1;
                radius = (r - l) / m as f64 * 2.0;
            }
        }
    }
    best
}

fn random_endpoint(rng: &mut ChaCha8Rng) -> Real {
    let k: i64 = rng.gen_range(-32..=32);
    let q = num_rational::BigRational::new(k.into(), 8.into());
    if rng.gen_bool(0.15) {
        Real::surd(q, num_rational::BigRational::new(1.into(), 2.into()))
    } else {
        Real::from_rational(q)
    }
}

/// Up to four random pieces with dyadic or surd endpoints, some unbounded,
/// some degenerate.
pub fn random_pieces(rng: &mut ChaCha8Rng) -> Vec<paramin::sets::Interval> {
    let n = rng.gen_range(0..=4);
    let mut out = Vec::new();
    for _ in 0..n {
        let a = random_endpoint(rng);
        let b = if rng.gen_bool(0.15) { a.clone() } else { random_endpoint(rng) };
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        let lo = if rng.gen_bool(0.1) { ExtendedReal::NegInf } else { ExtendedReal::Finite(a) };
        let hi = if rng.gen_bool(0.1) { ExtendedReal::PosInf } else { ExtendedReal::Finite(b) };
        if let Some(i) = paramin::sets::Interval::new(lo, rng.gen_bool(0.5), hi, rng.gen_bool(0.5)).unwrap() {
            out.push(i);
        }
    }
    out
}

pub fn random_set(rng: &mut ChaCha8Rng) -> paramin::sets::IntervalSet {
    paramin::sets::normalize(random_pieces(rng))
}

/// Probe points for a set: its finite endpoints, their neighbours and a few
/// random rationals.
pub fn probe_points(rng: &mut ChaCha8Rng, sets: &[&paramin::sets::IntervalSet]) -> Vec<Real> {
    let eps = Real::from_rational(num_rational::BigRational::new(1.into(), 1024.into()));
    let mut out = Vec::new();
    for s in sets {
        for e in s.finite_endpoints() {
            out.push(e.sub(&eps));
            out.push(e.add(&eps));
            out.push(e);
        }
    }
    for _ in 0..4 {
        out.push(random_endpoint(rng));
    }
    out
}
