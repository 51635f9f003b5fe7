//! Property tests for the set calculus, the expression language, the
//! minimizer and the checks.

mod common;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use proptest::prelude::*;

use common::*;
use paramin::checks::{check_cost_lsc_on_graph, check_lsc_at, check_usc_at, CheckPlan, Ctx, Status, Subject};
use paramin::expr::{parse_expr, BinOp, CmpOp, Env, Expr, Pred, Var};
use paramin::minimizer::{level_set, value};
use paramin::numeric::{ExtendedReal, Real};
use paramin::problem::{sample_grid, Problem};
use paramin::set_expr::parse_set_expr;
use paramin::sets::{excess, normalize, Interval, IntervalSet};
use paramin::theorems::{evaluate, Applicability, EngineConfig, TheoremReport};

fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn arb_endpoint() -> impl Strategy<Value = ExtendedReal> {
    prop_oneof![
        8 => (-32i64..=32).prop_map(|k| ExtendedReal::Finite(Real::from_rational(rational(k, 8)))),
        1 => (-32i64..=32).prop_map(|k| ExtendedReal::Finite(Real::surd(rational(k, 8), rational(1, 2)))),
    ]
}

fn arb_interval() -> impl Strategy<Value = Option<Interval>> {
    (arb_endpoint(), arb_endpoint(), any::<bool>(), any::<bool>(), 0u8..10, 0u8..10).prop_map(
        |(a, b, lc, hc, lo_inf, hi_inf)| {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let lo = if lo_inf == 0 { ExtendedReal::NegInf } else { a };
            let hi = if hi_inf == 0 { ExtendedReal::PosInf } else { b };
            Interval::new(lo, lc, hi, hc).unwrap()
        },
    )
}

fn arb_pieces() -> impl Strategy<Value = Vec<Interval>> {
    prop::collection::vec(arb_interval(), 0..5).prop_map(|v| v.into_iter().flatten().collect())
}

fn arb_set() -> impl Strategy<Value = IntervalSet> {
    arb_pieces().prop_map(normalize)
}

fn arb_point() -> impl Strategy<Value = Real> {
    (-260i64..=260).prop_map(|k| Real::from_rational(rational(k, 64)))
}

fn arb_const() -> impl Strategy<Value = Expr> {
    (-16i64..=16, prop_oneof![Just(1i64), Just(2), Just(3), Just(4)]).prop_map(|(n, d)| Expr::Const(rational(n, d)))
}

fn arb_cmp() -> impl Strategy<Value = CmpOp> {
    prop_oneof![
        Just(CmpOp::Lt),
        Just(CmpOp::Le),
        Just(CmpOp::Gt),
        Just(CmpOp::Ge),
        Just(CmpOp::Eq),
        Just(CmpOp::Ne)
    ]
}

/// Expression trees; `full` adds `sqrt2`, `inf` and rationality tests,
/// otherwise every leaf is rational.
fn arb_expr(depth: u32, full: bool) -> BoxedStrategy<Expr> {
    let leaf = if full {
        prop_oneof![
            4 => arb_const(),
            2 => Just(Expr::x()),
            2 => Just(Expr::y()),
            1 => Just(Expr::Sqrt2),
            1 => Just(Expr::PosInf),
        ]
        .boxed()
    } else {
        prop_oneof![2 => arb_const(), 1 => Just(Expr::x()), 1 => Just(Expr::y())].boxed()
    };
    leaf.prop_recursive(depth, 48, 3, move |inner| {
        let pred = (arb_cmp(), inner.clone(), inner.clone()).prop_map(|(op, a, b)| Pred::Cmp(op, a, b));
        let pred = if full {
            prop_oneof![
                3 => pred,
                1 => inner.clone().prop_map(Pred::IsRational),
            ]
            .boxed()
        } else {
            pred.boxed()
        };
        let pred = pred
            .prop_recursive(1, 4, 2, |p| {
                prop_oneof![
                    p.clone().prop_map(|a| Pred::Not(Box::new(a))),
                    (p.clone(), p.clone()).prop_map(|(a, b)| Pred::And(Box::new(a), Box::new(b))),
                    (p.clone(), p).prop_map(|(a, b)| Pred::Or(Box::new(a), Box::new(b))),
                ]
            })
            .boxed();
        let op = prop_oneof![Just(BinOp::Add), Just(BinOp::Sub), Just(BinOp::Mul), Just(BinOp::Div)];
        prop_oneof![
            inner.clone().prop_map(|a| Expr::Neg(Box::new(a))),
            (op, inner.clone(), inner.clone()).prop_map(|(o, a, b)| Expr::Bin(o, Box::new(a), Box::new(b))),
            inner.clone().prop_map(|a| Expr::Abs(Box::new(a))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Min(Box::new(a), Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Max(Box::new(a), Box::new(b))),
            pred.clone().prop_map(|p| Expr::Indicator(Box::new(p))),
            (pred, inner.clone(), inner).prop_map(|(p, a, b)| Expr::Piecewise(Box::new(p), Box::new(a), Box::new(b))),
        ]
    })
    .boxed()
}

/// Exact rational evaluation, written apart from the library evaluator;
/// `None` on division by zero.
fn eval_rational(e: &Expr, x: &BigRational, y: &BigRational) -> Option<BigRational> {
    Some(match e {
        Expr::Const(q) => q.clone(),
        Expr::Var(Var::X) => x.clone(),
        Expr::Var(Var::Y) => y.clone(),
        Expr::Neg(a) => -eval_rational(a, x, y)?,
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_rational(a, x, y)?, eval_rational(b, x, y)?);
            match op {
                BinOp::Add => a + b,
                BinOp::Sub => a - b,
                BinOp::Mul => a * b,
                BinOp::Div => {
                    if b.is_zero() {
                        return None;
                    }
                    a / b
                }
            }
        }
        Expr::Abs(a) => {
            let a = eval_rational(a, x, y)?;
            if a < BigRational::zero() {
                -a
            } else {
                a
            }
        }
        Expr::Min(a, b) => eval_rational(a, x, y)?.min(eval_rational(b, x, y)?),
        Expr::Max(a, b) => eval_rational(a, x, y)?.max(eval_rational(b, x, y)?),
        Expr::Indicator(p) => {
            if pred_rational(p, x, y)? {
                BigRational::from_integer(1.into())
            } else {
                BigRational::zero()
            }
        }
        Expr::Piecewise(p, a, b) => {
            if pred_rational(p, x, y)? {
                eval_rational(a, x, y)?
            } else {
                eval_rational(b, x, y)?
            }
        }
        Expr::Sqrt2 | Expr::PosInf => unreachable!("rational trees only"),
    })
}

fn pred_rational(p: &Pred, x: &BigRational, y: &BigRational) -> Option<bool> {
    Some(match p {
        Pred::Cmp(op, a, b) => {
            let (a, b) = (eval_rational(a, x, y)?, eval_rational(b, x, y)?);
            match op {
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
            }
        }
        Pred::IsRational(_) => true,
        Pred::Not(a) => !pred_rational(a, x, y)?,
        // left to right, stopping at the first deciding operand
        Pred::And(a, b) => pred_rational(a, x, y)? && pred_rational(b, x, y)?,
        Pred::Or(a, b) => pred_rational(a, x, y)? || pred_rational(b, x, y)?,
    })
}

fn zero() -> ExtendedReal {
    ExtendedReal::Finite(Real::zero())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn normalize_is_idempotent(pieces in arb_pieces()) {
        let s = normalize(pieces.clone());
        prop_assert_eq!(normalize(s.pieces().to_vec()), s.clone());
        let mut shuffled = pieces;
        shuffled.reverse();
        prop_assert_eq!(normalize(shuffled), s);
    }

    #[test]
    fn distance_zero_exactly_on_closure(s in arb_set(), p in arb_point()) {
        let zero_dist = paramin::sets::dist(&p, &s) == zero();
        prop_assert_eq!(zero_dist, s.closure().member(&p));
        for e in s.finite_endpoints() {
            prop_assert_eq!(paramin::sets::dist(&e, &s), zero());
        }
    }

    #[test]
    fn excess_zero_exactly_inside_closure(a in arb_set(), b in arb_set()) {
        prop_assume!(!a.is_empty());
        let e = excess(&a, &b).unwrap();
        let inside = a.pieces().iter().all(|piece| IntervalSet::from_interval(Some(piece.clone())).is_subset(&b.closure()));
        prop_assert_eq!(e == zero(), inside);
    }

    #[test]
    fn compact_means_closed_and_bounded(s in arb_set()) {
        prop_assert_eq!(s.is_compact(), s.is_closed() && s.is_bounded());
    }

    #[test]
    fn excess_triangle(a in arb_set(), c in arb_set(), b in arb_set()) {
        prop_assume!(!a.is_empty() && !c.is_empty());
        let c = c.closure();
        let ab = excess(&a, &b).unwrap().to_f64();
        let ac = excess(&a, &c).unwrap().to_f64();
        let cb = excess(&c, &b).unwrap().to_f64();
        prop_assert!(ab <= ac + cb + 1e-12 * (1.0 + ab.abs()), "{} > {} + {}", ab, ac, cb);
    }

    #[test]
    fn printed_expressions_parse_back(e in arb_expr(5, true).prop_filter("depth at most 6", |e| e.depth() <= 6)) {
        let text = e.to_string();
        let back = parse_expr(&text).map_err(|err| TestCaseError::fail(format!("{err}: {text}")))?;
        prop_assert_eq!(back, e);
    }

    #[test]
    fn rational_evaluation_is_exact(
        e in arb_expr(4, false),
        xn in -16i64..=16, xd in 1i64..=7,
        yn in -16i64..=16, yd in 1i64..=7,
    ) {
        let (x, y) = (rational(xn, xd), rational(yn, yd));
        let (rx, ry) = (Real::from_rational(x.clone()), Real::from_rational(y.clone()));
        let got = e.eval(&Env::new(&rx, &ry));
        match eval_rational(&e, &x, &y) {
            Some(q) => {
                let got = got.map_err(|err| TestCaseError::fail(format!("{err}: {e}")))?;
                prop_assert_eq!(got, ExtendedReal::Finite(Real::from_rational(q)));
            }
            None => prop_assert!(got.is_err(), "{} should divide by zero", e),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn feasible_sets_are_canonical(seed in any::<u64>(), k in 0usize..5) {
        let mut r = rng(seed);
        let text = phi_text(&mut r);
        let phi = parse_set_expr(&text).unwrap();
        let x = exact_grid(&Real::int(-1), &Real::int(1), 5)[k].clone();
        let s = phi.eval(&x).unwrap();
        prop_assert_eq!(normalize(s.pieces().to_vec()), s);
    }
}

fn some_points(p: &Problem) -> Vec<Real> {
    sample_grid(&p.x_domain, 3)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn level_sets_grow_and_match_the_value(seed in any::<u64>(), l1 in -24i64..=24, dl in 0i64..=16) {
        let p = random_problem(seed);
        let plan = CheckPlan::quick();
        let (l1, l2) = (Real::ratio(l1, 4), Real::ratio(l1 + dl, 4));
        for x in some_points(&p) {
            let m = value(&p, &x, &plan.min).unwrap();
            let d1 = level_set(&p, &x, &l1, &plan.min).unwrap();
            let d2 = level_set(&p, &x, &l2, &plan.min).unwrap();
            prop_assert!(d1.is_subset(&d2), "{} not inside {}", d1, d2);
            let below = m.value <= ExtendedReal::Finite(l1.clone());
            if !d1.is_empty() {
                prop_assert!(below);
            }
            if m.attained {
                prop_assert_eq!(below, !d1.is_empty());
            }
        }
    }

    #[test]
    fn negation_swaps_lower_and_upper(seed in any::<u64>(), k in 0usize..5, j in 0usize..5) {
        let p = random_problem(seed);
        let mut q = p.clone();
        q.u = q.u.clone().negate();
        let plan = CheckPlan::quick();
        let (cp, cq) = (Ctx::new(&p, &plan), Ctx::new(&q, &plan));
        let x = focus_points(&p)[k].clone();
        let y = Real::ratio(j as i64 - 2, 2);
        let subject = Subject::Cost { on_graph: false };
        let usc = check_usc_at(&cp, &subject, &x, Some(&y)).unwrap();
        let lsc = check_lsc_at(&cq, &subject, &x, Some(&y)).unwrap();
        prop_assert_eq!(usc.status, lsc.status);
        let usc = check_usc_at(&cq, &subject, &x, Some(&y)).unwrap();
        let lsc = check_lsc_at(&cp, &subject, &x, Some(&y)).unwrap();
        prop_assert_eq!(usc.status, lsc.status);
    }
}

fn focus_points(p: &Problem) -> Vec<Real> {
    let (Some(ExtendedReal::Finite(a)), Some(ExtendedReal::Finite(b))) = (p.x_domain.inf(), p.x_domain.sup()) else {
        panic!("unbounded window");
    };
    exact_grid(a, b, 5)
}

#[test]
fn negation_swaps_lower_and_upper_on_the_corpus() {
    let plan = CheckPlan::quick();
    for case in paramin::corpus::case_ids() {
        let f = paramin::corpus::load_case(case).unwrap();
        let Some(x) = f.focus_x.clone() else { continue };
        let p = f.problem;
        let mut q = p.clone();
        q.u = q.u.clone().negate();
        let (cp, cq) = (Ctx::new(&p, &plan), Ctx::new(&q, &plan));
        let subject = Subject::Cost { on_graph: false };
        for y in sample_grid(&p.phi_at(&x).unwrap(), 5) {
            let a = check_usc_at(&cp, &subject, &x, Some(&y)).unwrap().status;
            let b = check_lsc_at(&cq, &subject, &x, Some(&y)).unwrap().status;
            assert_eq!(a, b, "{case} at ({x}, {y})");
        }
    }
}

fn status(r: &TheoremReport, id: &str) -> Status {
    r.checks[id].status
}

fn holds(r: &TheoremReport, ids: &[&str]) -> bool {
    ids.iter().all(|id| status(r, id) == Status::Holds)
}

fn applicable(r: &TheoremReport, id: &str) -> bool {
    r.statements.iter().any(|s| s.id == id && s.applicability == Applicability::Applicable)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// Relations between checks that the definitions force, on one engine
    /// run per problem.
    #[test]
    fn engine_verdicts_respect_the_definitions(seed in any::<u64>(), k in 0usize..5, regular in any::<bool>()) {
        let p = if regular { random_regular_problem(seed) } else { random_problem(seed) };
        let x = focus_points(&p)[k].clone();
        let config = EngineConfig { plan: CheckPlan::quick(), ..EngineConfig::default() };
        let r = evaluate(&p, &x, &config).unwrap();

        // lsc cost, compact-valued usc feasible map: KN cannot fail
        if holds(&r, &["u_lsc_on_graph_at_x", "phi_compact_at_x", "phi_usc_at_x"]) {
            prop_assert_ne!(status(&r, "kn_at_x"), Status::Fails);
        }
        // KN everywhere is stronger than K-inf-compactness
        if holds(&r, &["kn"]) {
            prop_assert_ne!(status(&r, "k_inf_compact"), Status::Fails);
        }
        // KN with a finite value: the infimum is a minimum over a compact set
        if holds(&r, &["kn_at_x", "v_finite"]) {
            let m = value(&p, &x, &config.plan.min).unwrap();
            prop_assert!(m.attained);
            prop_assert!(m.argmin.is_nonempty_compact());
            prop_assert_eq!(status(&r, "argmin_compact"), Status::Holds);
        }
        // the two local assumptions agree whenever the standing hypotheses hold
        for id in ["TH1.6", "TH1.7"] {
            let s = r.statements.iter().find(|s| s.id == id).unwrap();
            let part = s.parts.iter().find(|q| q.label == "(i)<=>(ii)").unwrap();
            if part.applicability == Applicability::Applicable {
                let (a, b) = (status(&r, "condition_iv"), status(&r, "argmin_usc_at_x"));
                prop_assert!(!matches!((a, b), (Status::Holds, Status::Fails) | (Status::Fails, Status::Holds)), "{id}: {a:?} vs {b:?}");
            }
        }
        // pointwise KN on the window agrees with lsc on the whole graph
        if holds(&r, &["kn"]) {
            let ctx = Ctx::new(&p, &config.plan);
            for z in sample_grid(&p.x_domain, config.plan.window_grid) {
                let ys = sample_grid(&p.phi_at(&z).unwrap(), 5);
                prop_assert_ne!(check_cost_lsc_on_graph(&ctx, &z, &ys).unwrap().status, Status::Fails, "at {}", z);
            }
        }
        // the hypotheses of BS1 make B1 applicable to the truncated problem
        if applicable(&r, "BS1") {
            let lambda = r.lambda_iii.clone().expect("condition iii certified a level");
            let config = EngineConfig { lambda: Some(lambda), ..config };
            let t = evaluate(&p, &x, &config).unwrap();
            prop_assert_ne!(status(&t, "kn_truncated_at_x"), Status::Fails);
        }
    }
}

#[test]
fn corpus_exhibits_the_non_implications() {
    let config = EngineConfig::default();
    let run = |case: &str| paramin::corpus::run_case(case, &config).unwrap().report.unwrap();
    let r = run("ex4_1");
    assert!(applicable(&r, "TH1.2") && !applicable(&r, "TH1.1"));
    let r = run("ex4_3a");
    assert!(holds(&r, &["u_usc_on_graph", "phi_lsc"]) && !applicable(&r, "BS2"));
    let r = run("ex4_3b");
    assert!(holds(&r, &["u_usc_joint", "argmin_compact", "condition_iv"]) && !applicable(&r, "B2"));
    let r = run("ex4_4");
    assert!(applicable(&r, "BS3") && !applicable(&r, "B3"));
    let r = run("ex4_5");
    assert!(applicable(&r, "B3") && !applicable(&r, "BS3"));
}
