use super::*;
use crate::expr::parse_expr;
use crate::minimizer::truncate;
use crate::problem::Problem;
use crate::set_expr::parse_set_expr;
use crate::sets::IntervalSet;

fn problem(x: &str, y: &str, u: &str, phi: &str) -> Problem {
    Problem::new(
        "t",
        parse_set_expr(x).unwrap().eval(&Real::zero()).unwrap(),
        parse_set_expr(y).unwrap().eval(&Real::zero()).unwrap(),
        parse_expr(u).unwrap(),
        parse_set_expr(phi).unwrap(),
    )
    .unwrap()
}

fn ex41() -> Problem {
    problem("[-2, 2]", "reals", "min(abs(x - y), 1)", "reals")
}

fn ex43b() -> Problem {
    problem("[0, 1]", "[-1, 0]", "abs(x - y)", "if x == 0 then {0, -1} else {0}")
}

fn ex46() -> Problem {
    problem("[0, 1]", "[0, inf)", "0", "if x > 0 then {1/x} else {0}")
}

fn ex49() -> Problem {
    problem("[0, 1]", "[0, 1]", "I{x != 0}", "{x}")
}

fn zero() -> Real {
    Real::zero()
}

/// Asserts the verdict fails and its witness replays, also after a JSON
/// round trip.
fn fails_and_replays<P: crate::problem::Parametric + ?Sized>(p: &P, v: &Verdict, plan: &CheckPlan) {
    assert!(v.is(Status::Fails), "{v:?}");
    let w = v.witness.as_ref().unwrap();
    assert!(w.x_seq.len() >= 8, "{w:?}");
    let m = replay(p, w, plan).unwrap_or_else(|e| panic!("{e}: {w:?}"));
    assert!((m - w.violation_margin).abs() <= 1e-12 || m == w.violation_margin);
    let text = serde_json::to_string(w).unwrap();
    let back: Witness = serde_json::from_str(&text).unwrap();
    replay(p, &back, plan).unwrap();
}

#[test]
fn map_lsc_fails_where_the_image_loses_a_point() {
    let p = ex43b();
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_map_lsc_at(&ctx, &SetSubject::Phi, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    assert!((v.margin - 1.0).abs() < 1e-9);
    let v = check_map_usc_at(&ctx, &SetSubject::Phi, &zero()).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let v = check_condition_iv(&ctx, &zero()).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
}

#[test]
fn reciprocal_image_is_closed_but_not_usc() {
    let p = ex46();
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_map_usc_at(&ctx, &SetSubject::Phi, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    let v = check_map_usc_at(&ctx, &SetSubject::ArgMin, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    let grid = crate::problem::sample_grid(&p.x_domain, 8);
    let v = check_closed_graph(&ctx, &SetSubject::Phi, &grid).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let v = check_kn_inf_compact_at(&ctx, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    let v = check_condition_iv(&ctx, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
}

#[test]
fn half_open_image_has_an_open_graph() {
    let p = problem("[0, 1]", "reals", "abs(y)", "[-1, 0)");
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_closed_graph(&ctx, &SetSubject::Phi, &[Real::ratio(1, 2)]).unwrap();
    fails_and_replays(&p, &v, &plan);
    assert_eq!(v.margin, 0.0);
    let v = check_argmin_compact(&ctx, &Real::ratio(1, 2)).unwrap();
    fails_and_replays(&p, &v, &plan);
    let full = problem("[0, 1]", "reals", "abs(y)", "reals");
    let ctx = Ctx::new(&full, &plan);
    let v = check_closed_graph(&ctx, &SetSubject::Phi, &[Real::ratio(1, 2)]).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
}

#[test]
fn saturated_distance_is_not_inf_compact() {
    let p = ex41();
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_inf_compact(&ctx, &zero(), &[Real::one()]).unwrap();
    fails_and_replays(&p, &v, &plan);
    let v = check_inf_compact(&ctx, &zero(), &[Real::ratio(1, 2), Real::int(-1)]).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let v = check_kn_inf_compact_at(&ctx, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    let k = IntervalSet::closed(zero(), Real::one()).unwrap();
    let v = check_k_inf_compact(&ctx, &k).unwrap();
    fails_and_replays(&p, &v, &plan);
    let (v, c) = check_condition_iii(&ctx, &zero(), &Real::ratio(1, 2)).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let c = c.unwrap();
    assert_eq!(c.c, IntervalSet::closed(Real::int(-1), Real::one()).unwrap());
    let v = check_condition_iv(&ctx, &zero()).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
}

#[test]
fn absolute_value_is_inf_compact() {
    let p = problem("[0, 1]", "reals", "abs(y)", "reals");
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_inf_compact(&ctx, &zero(), &[Real::one(), Real::int(3)]).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let k = IntervalSet::closed(zero(), Real::one()).unwrap();
    assert!(check_k_inf_compact(&ctx, &k).unwrap().is(Status::Holds));
    let unit = problem("[0, 1]", "[0, 1]", "x * y + y * y", "[0, 1]");
    let ctx = Ctx::new(&unit, &plan);
    for x in [zero(), Real::ratio(1, 3), Real::one()] {
        let v = check_kn_inf_compact_at(&ctx, &x).unwrap();
        assert!(v.is(Status::Holds), "{x}: {v:?}");
    }
}

#[test]
fn step_cost_is_k_inf_compact() {
    let p = problem("[0, 1]", "[0, 2]", "I{x - y < 0}", "[0, 2]");
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let k = IntervalSet::closed(zero(), Real::one()).unwrap();
    let v = check_k_inf_compact(&ctx, &k).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
}

#[test]
fn indicator_level_sets_vanish_off_zero() {
    let p = ex49();
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let (v, c) = check_condition_iii(&ctx, &zero(), &Real::ratio(1, 2)).unwrap();
    fails_and_replays(&p, &v, &plan);
    assert!(c.is_none());
    assert!((v.margin - 0.5).abs() < 1e-12);
    let v = check_usc_at(&ctx, &Subject::Cost { on_graph: true }, &zero(), Some(&zero())).unwrap();
    fails_and_replays(&p, &v, &plan);
    let v = check_lsc_at(&ctx, &Subject::Value, &zero(), None).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let v = check_usc_at(&ctx, &Subject::Value, &zero(), None).unwrap();
    fails_and_replays(&p, &v, &plan);
}

#[test]
fn truncated_witnesses_replay_on_the_base_problem() {
    let p = ex49();
    let plan = CheckPlan::default();
    let tp = truncate(&p, &Real::ratio(1, 2), &zero(), &plan.min).unwrap();
    let ctx = Ctx::new(&tp, &plan);
    let v = check_kn_inf_compact_at(&ctx, &zero()).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
    let v = check_usc_at(&ctx, &Subject::Value, &zero(), None).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");

    let p = ex43b();
    let tp = truncate(&p, &Real::one(), &zero(), &plan.min).unwrap();
    let ctx = Ctx::new(&tp, &plan);
    let v = check_map_lsc_at(&ctx, &SetSubject::Phi, &zero()).unwrap();
    fails_and_replays(&p, &v, &plan);
    fails_and_replays(&tp, &v, &plan);
    assert!(v.witness.as_ref().unwrap().truncation.is_some());
}

#[test]
fn rational_indicator_is_not_lsc_at_irrationals() {
    let mut p = problem("[0, 1]", "[0, 1]", "-x * I{is_rat(x)}", "{x}");
    p.float_is_irrational = true;
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let f = Subject::Scalar {
        f: parse_expr("-x * I{is_rat(x)}").unwrap(),
    };
    let a = Real::root2_multiple(num_rational::BigRational::new(1.into(), 2.into()));
    let v = check_lsc_at(&ctx, &f, &a, None).unwrap();
    fails_and_replays(&p, &v, &plan);
    assert!((v.margin - a.to_f64()).abs() < 1e-6, "{}", v.margin);
    let v = check_usc_at(&ctx, &f, &zero(), None).unwrap();
    assert!(v.is(Status::Holds), "{v:?}");
}

#[test]
fn unattained_infimum_has_a_minimizing_witness() {
    let p = problem("[0, 1]", "[-1, 0]", "abs(x - y)", "[-1, 0)");
    let plan = CheckPlan::default();
    let ctx = Ctx::new(&p, &plan);
    let v = check_argmin_compact(&ctx, &Real::ratio(1, 2)).unwrap();
    fails_and_replays(&p, &v, &plan);
    let w = v.witness.unwrap();
    assert!(matches!(w.claim, Claim::Unattained { .. }));
}

#[test]
fn verdict_conjunction() {
    let h = Verdict::holds(0.1, 2);
    let u = Verdict::unknown("u", 3);
    assert!(Verdict::all([h.clone(), u.clone()]).is(Status::Unknown));
    assert!(Verdict::all([h.clone(), h.clone()]).is(Status::Holds));
    assert_eq!(Verdict::all([h, u]).budget_used, 5);
}
