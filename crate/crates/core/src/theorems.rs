//! Statements about value functions and solution multifunctions, each run
//! as hypothesis checks against conclusion checks.
//!
//! A statement is applicable at a point when every hypothesis HOLDS. A
//! soundness violation is an applicable statement with a conclusion that
//! FAILS; UNKNOWN hypotheses never count against a statement.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::checks::{
    check_argmin_compact, check_closed_graph, check_condition_iii, check_condition_iv,
    check_cost_lsc_on_graph, check_cost_usc_on_graph, check_inf_compact, check_joint_continuity,
    check_k_inf_compact, check_kn_inf_compact_at, check_lsc_at, check_map_lsc_at, check_map_usc_at,
    check_set_compact, check_usc_at, check_value_below, CheckError, CheckPlan, ConditionIii, Ctx,
    SetSubject, Status, Subject, Verdict,
};
use crate::minimizer::{truncate, TruncatedProblem};
use crate::numeric::{ExtendedReal, Real};
use crate::problem::{sample_grid, Parametric};
use crate::sets::IntervalSet;

/// A named check evaluated at the focus point `x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Atom {
    /// `v(x) < +∞`, i.e. `u(x,y) < +∞` for some `y ∈ Φ(x)`.
    VFinite,
    /// `u(x,y) < λ` for some `y ∈ Φ(x)`.
    LambdaStrict,
    /// `u(x,y) ≤ λ` for some `y ∈ Φ(x)`.
    LambdaWeak,
    VLscAtX,
    VUscAtX,
    VContinuousAtX,
    /// `v` continuous at sampled points of the parameter window.
    VContinuous,
    ULscOnGraphAtX,
    UUscOnGraphAtX,
    UUscOnGraph,
    /// `u` usc at every `(x,y)`, `y ∈ Φ*(x)`.
    UUscOnArgminGraph,
    /// `u` lower semicontinuous on `X×Y`.
    ULscJoint,
    UUscJoint,
    UContinuousJoint,
    PhiLscAtX,
    PhiLsc,
    PhiUscAtX,
    PhiCompactAtX,
    PhiClosed,
    /// `Φ*(x)` is nonempty and compact.
    ArgminCompact,
    /// `Φ*(x)` is nonempty and compact whenever `v(x) < +∞`.
    ArgminCompactIfFinite,
    ArgminUscAtX,
    KnAtX,
    Kn,
    /// `u_{λ,x}` is 𝕂ℕ-inf-compact on `Gr_{x}(Φ_{λ,x})`.
    KnTruncatedAtX,
    InfCompactAtX,
    KInfCompact,
    ConditionIii,
    ConditionIv,
}

impl Atom {
    pub const ALL: [Atom; 29] = [
        Atom::VFinite,
        Atom::LambdaStrict,
        Atom::LambdaWeak,
        Atom::VLscAtX,
        Atom::VUscAtX,
        Atom::VContinuousAtX,
        Atom::VContinuous,
        Atom::ULscOnGraphAtX,
        Atom::UUscOnGraphAtX,
        Atom::UUscOnGraph,
        Atom::UUscOnArgminGraph,
        Atom::ULscJoint,
        Atom::UUscJoint,
        Atom::UContinuousJoint,
        Atom::PhiLscAtX,
        Atom::PhiLsc,
        Atom::PhiUscAtX,
        Atom::PhiCompactAtX,
        Atom::PhiClosed,
        Atom::ArgminCompact,
        Atom::ArgminCompactIfFinite,
        Atom::ArgminUscAtX,
        Atom::KnAtX,
        Atom::Kn,
        Atom::KnTruncatedAtX,
        Atom::InfCompactAtX,
        Atom::KInfCompact,
        Atom::ConditionIii,
        Atom::ConditionIv,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Atom::VFinite => "v_finite",
            Atom::LambdaStrict => "lambda_strict",
            Atom::LambdaWeak => "lambda_weak",
            Atom::VLscAtX => "v_lsc_at_x",
            Atom::VUscAtX => "v_usc_at_x",
            Atom::VContinuousAtX => "v_continuous_at_x",
            Atom::VContinuous => "v_continuous",
            Atom::ULscOnGraphAtX => "u_lsc_on_graph_at_x",
            Atom::UUscOnGraphAtX => "u_usc_on_graph_at_x",
            Atom::UUscOnGraph => "u_usc_on_graph",
            Atom::UUscOnArgminGraph => "u_usc_on_argmin_graph",
            Atom::ULscJoint => "u_lsc_joint",
            Atom::UUscJoint => "u_usc_joint",
            Atom::UContinuousJoint => "u_continuous_joint",
            Atom::PhiLscAtX => "phi_lsc_at_x",
            Atom::PhiLsc => "phi_lsc",
            Atom::PhiUscAtX => "phi_usc_at_x",
            Atom::PhiCompactAtX => "phi_compact_at_x",
            Atom::PhiClosed => "phi_closed",
            Atom::ArgminCompact => "argmin_compact",
            Atom::ArgminCompactIfFinite => "argmin_compact_if_finite",
            Atom::ArgminUscAtX => "argmin_usc_at_x",
            Atom::KnAtX => "kn_at_x",
            Atom::Kn => "kn",
            Atom::KnTruncatedAtX => "kn_truncated_at_x",
            Atom::InfCompactAtX => "inf_compact_at_x",
            Atom::KInfCompact => "k_inf_compact",
            Atom::ConditionIii => "condition_iii",
            Atom::ConditionIv => "condition_iv",
        }
    }

    pub fn from_id(id: &str) -> Option<Atom> {
        Atom::ALL.iter().copied().find(|a| a.id() == id)
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// How a part relates its atoms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartKind {
    /// Hypotheses imply every conclusion.
    Implies(Vec<Atom>),
    /// Under the hypotheses the two atoms never disagree as HOLDS vs FAILS.
    Equivalent(Atom, Atom),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Part {
    pub label: &'static str,
    pub hypotheses: Vec<Atom>,
    pub kind: PartKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StatementSpec {
    pub id: &'static str,
    pub citation: &'static str,
    /// The first part is the statement proper; further parts encode
    /// equivalences and their consequences.
    pub parts: Vec<Part>,
}

fn implies(label: &'static str, hypotheses: &[Atom], conclusions: &[Atom]) -> Part {
    Part {
        label,
        hypotheses: hypotheses.to_vec(),
        kind: PartKind::Implies(conclusions.to_vec()),
    }
}

fn equivalent(label: &'static str, hypotheses: &[Atom], a: Atom, b: Atom) -> Part {
    Part {
        label,
        hypotheses: hypotheses.to_vec(),
        kind: PartKind::Equivalent(a, b),
    }
}

/// All sixteen statements.
pub fn statement_catalog() -> Vec<StatementSpec> {
    use Atom::*;
    let spec = |id, citation, parts| StatementSpec { id, citation, parts };
    let local = |standing: &[Atom]| {
        let mut with_usc = standing.to_vec();
        with_usc.push(UUscOnArgminGraph);
        let mut via_iv = with_usc.clone();
        via_iv.push(ConditionIv);
        let mut via_usc = with_usc.clone();
        via_usc.push(ArgminUscAtX);
        vec![
            equivalent("(i)<=>(ii)", &with_usc, ConditionIv, ArgminUscAtX),
            implies("(i)=>(ii),continuity", &via_iv, &[ArgminUscAtX, VLscAtX, VUscAtX]),
            implies("(ii)=>(i),continuity", &via_usc, &[ConditionIv, VLscAtX, VUscAtX]),
        ]
    };
    let mut th16 = vec![implies("main", &[VFinite, KnAtX], &[ArgminCompact])];
    th16.extend(local(&[VFinite, KnAtX]));
    let th17 = local(&[LambdaStrict, KnTruncatedAtX]);
    vec![
        spec(
            "TH1.1",
            "the solution multifunction is upper semi-continuous and compact-valued",
            vec![implies(
                "main",
                &[Kn, UUscOnGraph, PhiLsc],
                &[VLscAtX, VUscAtX, ArgminUscAtX, ArgminCompactIfFinite],
            )],
        ),
        spec(
            "TH1.2",
            "the function v is continuous at x",
            vec![implies(
                "main",
                &[UContinuousJoint, PhiClosed, ConditionIii, ConditionIv],
                &[VLscAtX, VUscAtX, ArgminUscAtX],
            )],
        ),
        spec(
            "TH1.3",
            "Φ*(x) is a nonempty compact set",
            vec![implies("main", &[KnAtX], &[VLscAtX, ArgminCompactIfFinite])],
        ),
        spec(
            "TH1.4(i)",
            "is upper semi-continuous at x",
            vec![implies("main", &[UUscOnGraphAtX, PhiLscAtX], &[VUscAtX])],
        ),
        spec(
            "TH1.4(ii)",
            "is upper semi-continuous at x",
            vec![implies("main", &[ArgminCompact, UUscOnArgminGraph, ConditionIv], &[VUscAtX])],
        ),
        spec(
            "TH1.5",
            "Φ*(x) ∈ 𝕂(𝕐) and Φ* is upper",
            vec![implies("main", &[KnAtX, VContinuousAtX, VFinite], &[ArgminCompact, ArgminUscAtX])],
        ),
        spec("TH1.6", "the following two assumptions are equivalent", th16),
        spec("TH1.7", "each of them implies that v is continuous at x", th17),
        spec(
            "COR1.1",
            "is lower semi-continuous at x and Φ*(x) ∈ 𝕂(𝕐)",
            vec![implies("main", &[LambdaWeak, KnTruncatedAtX], &[VLscAtX, ArgminCompact])],
        ),
        spec(
            "B1",
            "Lower semi-continuity of minima",
            vec![implies("main", &[Kn], &[VLscAtX])],
        ),
        spec(
            "B2",
            "Upper semi-continuity of minima",
            vec![implies("main", &[UUscOnGraph, PhiLsc], &[VUscAtX])],
        ),
        spec(
            "B3",
            "Upper semi-continuity of the solution multifunction",
            vec![implies("main", &[Kn, VContinuous], &[ArgminUscAtX, ArgminCompactIfFinite])],
        ),
        spec(
            "BS1",
            "the value function v is lower semi-continuous at x",
            vec![implies("main", &[ULscJoint, PhiClosed, ConditionIii], &[VLscAtX])],
        ),
        spec(
            "BS2",
            "the value function v is upper semi-continuous at x",
            vec![implies("main", &[UUscJoint, ArgminCompact, ConditionIv], &[VUscAtX])],
        ),
        spec(
            "BS3",
            "upper semi-continuous at x",
            vec![implies(
                "main",
                &[UContinuousJoint, PhiClosed, ConditionIii, ConditionIv],
                &[ArgminUscAtX],
            )],
        ),
        spec(
            "LEM2.1",
            "is 𝕂ℕ-inf-compact on Gr_Z(Φ)",
            vec![implies("main", &[ULscOnGraphAtX, PhiCompactAtX, PhiUscAtX], &[KnAtX])],
        ),
    ]
}

/// Deliberate checker defects used to show the soundness detector is live.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fault {
    /// Negates the verdict of lower semicontinuity of `v` at `x`.
    FlipLsc,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub plan: CheckPlan,
    /// Truncation level; `v(x) + 1` when absent.
    pub lambda: Option<Real>,
    pub fault: Option<Fault>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            plan: CheckPlan::default(),
            lambda: None,
            fault: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("{atom}: {source}")]
pub struct EngineError {
    pub atom: Atom,
    /// Statements that needed the failed check.
    pub statements: Vec<&'static str>,
    #[source]
    pub source: CheckError,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Applicability {
    Applicable,
    Blocked { by: Vec<String> },
    Unknown { by: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartReport {
    pub label: String,
    pub hypotheses: BTreeMap<String, Status>,
    pub applicability: Applicability,
    /// Predicted HOLDS for every conclusion when applicable.
    pub conclusions: BTreeMap<String, Status>,
    pub violated: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatementReport {
    pub id: String,
    pub citation: String,
    pub applicability: Applicability,
    pub parts: Vec<PartReport>,
    pub sound: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TheoremReport {
    pub x: Real,
    /// Truncation level used by the truncated statements.
    pub lambda: Real,
    /// The level that certified the uniform level-set bound, if any.
    pub lambda_iii: Option<Real>,
    pub condition_iii: Option<ConditionIii>,
    pub checks: BTreeMap<String, Verdict>,
    pub statements: Vec<StatementReport>,
    pub fault: Option<Fault>,
    /// Cost evaluations spent by all checks.
    pub evaluations: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub statement: String,
    pub part: String,
    pub hypotheses: BTreeMap<String, Status>,
    pub conclusion: String,
    pub witness: Option<Verdict>,
}

/// Shared state of one evaluation.
struct Engine<'a, P: Parametric + ?Sized> {
    ctx: Ctx<'a, P>,
    x: Real,
    lambda: Real,
    explicit_lambda: Option<Real>,
    grid: Vec<Real>,
    memo: BTreeMap<Atom, Verdict>,
    iii: Option<(Real, ConditionIii)>,
}

fn soft(r: Result<Verdict, CheckError>) -> Result<Verdict, CheckError> {
    match r {
        Ok(v) => Ok(v),
        Err(e @ CheckError::Problem(_)) => Err(e),
        Err(e) => Ok(Verdict::unknown(e.to_string(), 0)),
    }
}

impl<'a, P: Parametric + ?Sized> Engine<'a, P> {
    /// Sample points of `Φ(z)` plus the ends of `Φ*(z)`; a coarser grid away
    /// from the focus point.
    fn points_ys(&self, z: &Real) -> Result<Vec<Real>, CheckError> {
        let phi = self.ctx.phi(z)?;
        let n = if *z == self.x { self.ctx.plan.set_grid } else { self.ctx.plan.set_grid.min(9) };
        let mut ys = crate::problem::sample_grid(&phi, n);
        ys.retain(|y| phi.member(y));
        ys.extend(self.ctx.value(z)?.argmin.finite_endpoints());
        ys.sort();
        ys.dedup();
        Ok(ys)
    }

    fn over_grid(
        &self,
        f: impl Fn(&Real) -> Result<Verdict, CheckError>,
    ) -> Result<Verdict, CheckError> {
        let mut parts = Vec::new();
        for p in &self.grid {
            let v = f(p)?;
            let stop = v.is(Status::Fails);
            parts.push(v);
            if stop {
                break;
            }
        }
        Ok(Verdict::all(parts))
    }

    fn compute(&mut self, atom: Atom) -> Result<Verdict, CheckError> {
        let ctx = &self.ctx;
        let x = &self.x.clone();
        Ok(match atom {
            Atom::VFinite => check_value_below(ctx, x, None, true)?,
            Atom::LambdaStrict => check_value_below(ctx, x, Some(&self.lambda), true)?,
            Atom::LambdaWeak => check_value_below(ctx, x, Some(&self.lambda), false)?,
            Atom::VLscAtX => check_lsc_at(ctx, &Subject::Value, x, None)?,
            Atom::VUscAtX => check_usc_at(ctx, &Subject::Value, x, None)?,
            Atom::VContinuousAtX => Verdict::all([self.get(Atom::VLscAtX)?, self.get(Atom::VUscAtX)?]),
            Atom::VContinuous => self.over_grid(|p| {
                Ok(Verdict::all([
                    check_lsc_at(ctx, &Subject::Value, p, None)?,
                    check_usc_at(ctx, &Subject::Value, p, None)?,
                ]))
            })?,
            Atom::ULscOnGraphAtX => check_cost_lsc_on_graph(ctx, x, &self.points_ys(x)?)?,
            Atom::UUscOnGraphAtX => check_cost_usc_on_graph(ctx, x, &self.points_ys(x)?)?,
            Atom::UUscOnGraph => self.over_grid(|p| check_cost_usc_on_graph(ctx, p, &self.points_ys(p)?))?,
            Atom::UUscOnArgminGraph => {
                let star = ctx.value(x)?.argmin;
                let mut ys = crate::problem::sample_grid(&star, 33);
                ys.retain(|y| star.member(y));
                check_cost_usc_on_graph(ctx, x, &ys)?
            }
            Atom::ULscJoint | Atom::UUscJoint => {
                let (l, u) = check_joint_continuity(ctx, &self.grid)?;
                self.memo.insert(Atom::ULscJoint, l.clone());
                self.memo.insert(Atom::UUscJoint, u.clone());
                if atom == Atom::ULscJoint {
                    l
                } else {
                    u
                }
            }
            Atom::UContinuousJoint => Verdict::all([self.get(Atom::ULscJoint)?, self.get(Atom::UUscJoint)?]),
            Atom::PhiLscAtX => check_map_lsc_at(ctx, &SetSubject::Phi, x)?,
            Atom::PhiLsc => self.over_grid(|p| check_map_lsc_at(ctx, &SetSubject::Phi, p))?,
            Atom::PhiUscAtX => check_map_usc_at(ctx, &SetSubject::Phi, x)?,
            Atom::PhiCompactAtX => check_set_compact(ctx, &SetSubject::Phi, x)?,
            Atom::PhiClosed => check_closed_graph(ctx, &SetSubject::Phi, &self.grid)?,
            Atom::ArgminCompact => check_argmin_compact(ctx, x)?,
            Atom::ArgminCompactIfFinite => {
                if ctx.value(x)?.value == ExtendedReal::PosInf {
                    Verdict::holds(0.0, 0).with_note("v(x) = +inf")
                } else {
                    self.get(Atom::ArgminCompact)?
                }
            }
            Atom::ArgminUscAtX => check_map_usc_at(ctx, &SetSubject::ArgMin, x)?,
            Atom::KnAtX => check_kn_inf_compact_at(ctx, x)?,
            Atom::Kn => self.over_grid(|p| check_kn_inf_compact_at(ctx, p))?,
            Atom::KnTruncatedAtX => {
                let tp: TruncatedProblem<'_, P> = truncate(ctx.p, &self.lambda, x, &ctx.plan.min)?;
                if tp.anchor_empty {
                    Verdict::unknown("the truncated mapping is empty at x", 0)
                } else {
                    let tctx = Ctx::new(&tp, ctx.plan);
                    check_kn_inf_compact_at(&tctx, x)?
                }
            }
            Atom::InfCompactAtX => {
                let base = match ctx.value(x)?.value {
                    ExtendedReal::Finite(v) => v,
                    _ => Real::zero(),
                };
                let lambdas: Vec<Real> = [Real::ratio(1, 16), Real::one(), Real::int(16)]
                    .iter()
                    .map(|d| base.add(d))
                    .collect();
                check_inf_compact(ctx, x, &lambdas)?
            }
            Atom::KInfCompact => {
                let k = compact_neighbourhood(ctx.window(), x);
                check_k_inf_compact(ctx, &k)?
            }
            Atom::ConditionIii => self.condition_iii()?,
            Atom::ConditionIv => check_condition_iv(ctx, x)?,
        })
    }

    /// Scans an explicit `λ`, then `λ = v(x) + 2^-j`, `j = 0..=10`, and
    /// keeps the first level that certifies.
    fn condition_iii(&mut self) -> Result<Verdict, CheckError> {
        let x = self.x.clone();
        let mut levels: Vec<Real> = self.explicit_lambda.iter().cloned().collect();
        if let ExtendedReal::Finite(v) = self.ctx.value(&x)?.value {
            for j in 0..=10 {
                levels.push(v.add(&Real::exact_from_f64(0.5f64.powi(j)).expect("power of two")));
            }
        }
        let mut first: Option<Verdict> = None;
        for lambda in levels {
            let (v, c) = check_condition_iii(&self.ctx, &x, &lambda)?;
            if let (Status::Holds, Some(c)) = (v.status, c) {
                self.iii = Some((lambda, c));
                return Ok(v);
            }
            first.get_or_insert(v);
        }
        Ok(first.unwrap_or_else(|| Verdict::unknown("v(x) is not finite", 0)))
    }

    fn get(&mut self, atom: Atom) -> Result<Verdict, CheckError> {
        if let Some(v) = self.memo.get(&atom) {
            return Ok(v.clone());
        }
        let v = self.compute(atom)?;
        self.memo.insert(atom, v.clone());
        Ok(v)
    }
}

/// `K` for the 𝕂-inf-compactness check: the window when compact, else the
/// closed unit ball around `x` inside it.
fn compact_neighbourhood(window: &IntervalSet, x: &Real) -> IntervalSet {
    if window.is_compact() {
        return window.clone();
    }
    let ball = IntervalSet::closed(x.sub(&Real::one()), x.add(&Real::one())).expect("ordered endpoints");
    let k = ball.intersect(window).closure();
    if k.is_subset(window) {
        k
    } else {
        IntervalSet::point(x.clone())
    }
}

fn fault_applies(fault: Option<Fault>, atom: Atom) -> bool {
    matches!((fault, atom), (Some(Fault::FlipLsc), Atom::VLscAtX))
}

fn flip(v: Verdict) -> Verdict {
    let status = match v.status {
        Status::Holds => Status::Fails,
        Status::Fails => Status::Holds,
        Status::Unknown => Status::Unknown,
    };
    Verdict {
        status,
        witness: None,
        note: "fault injected: negated verdict".into(),
        ..v
    }
}

fn applicability(hyps: &BTreeMap<String, Status>) -> Applicability {
    let by = |s: Status| -> Vec<String> { hyps.iter().filter(|(_, v)| **v == s).map(|(k, _)| k.clone()).collect() };
    let failed = by(Status::Fails);
    if !failed.is_empty() {
        return Applicability::Blocked { by: failed };
    }
    let unknown = by(Status::Unknown);
    if !unknown.is_empty() {
        return Applicability::Unknown { by: unknown };
    }
    Applicability::Applicable
}

/// Runs every statement at `x`. Checks shared between statements run once.
pub fn evaluate<P: Parametric + ?Sized>(
    p: &P,
    x: &Real,
    config: &EngineConfig,
) -> Result<TheoremReport, EngineError> {
    let catalog = statement_catalog();
    let ctx = Ctx::new(p, &config.plan);
    let wrap = |atom: Atom, source: CheckError| EngineError {
        atom,
        statements: catalog
            .iter()
            .filter(|s| s.parts.iter().any(|part| part_atoms(part).contains(&atom)))
            .map(|s| s.id)
            .collect(),
        source,
    };
    let v = ctx
        .value(x)
        .map_err(|e| wrap(Atom::VFinite, e))?
        .value;
    let lambda = match (&config.lambda, &v) {
        (Some(l), _) => l.clone(),
        (None, ExtendedReal::Finite(v)) => v.add(&Real::one()),
        (None, _) => Real::one(),
    };
    let mut grid = sample_grid(p.x_domain(), config.plan.window_grid);
    grid.push(x.clone());
    grid.retain(|g| p.x_domain().member(g));
    grid.sort();
    grid.dedup();
    let mut engine = Engine {
        ctx,
        x: x.clone(),
        lambda: lambda.clone(),
        explicit_lambda: config.lambda.clone(),
        grid,
        memo: BTreeMap::new(),
        iii: None,
    };
    let mut checks = BTreeMap::new();
    for atom in Atom::ALL {
        let verdict = soft(engine.get(atom)).map_err(|e| wrap(atom, e))?;
        let verdict = if fault_applies(config.fault, atom) { flip(verdict) } else { verdict };
        checks.insert(atom, verdict);
    }
    let status = |a: &Atom| checks[a].status;
    let mut statements = Vec::new();
    for spec in &catalog {
        let mut parts = Vec::new();
        for part in &spec.parts {
            let hypotheses: BTreeMap<String, Status> =
                part.hypotheses.iter().map(|a| (a.id().to_string(), status(a))).collect();
            let app = applicability(&hypotheses);
            let (conclusions, violated) = match &part.kind {
                PartKind::Implies(cs) => {
                    let c: BTreeMap<String, Status> = cs.iter().map(|a| (a.id().to_string(), status(a))).collect();
                    let bad = app == Applicability::Applicable && c.values().any(|s| *s == Status::Fails);
                    (c, bad)
                }
                PartKind::Equivalent(a, b) => {
                    let c: BTreeMap<String, Status> =
                        [a, b].iter().map(|a| (a.id().to_string(), status(a))).collect();
                    let (sa, sb) = (status(a), status(b));
                    let disagree = matches!(
                        (sa, sb),
                        (Status::Holds, Status::Fails) | (Status::Fails, Status::Holds)
                    );
                    (c, app == Applicability::Applicable && disagree)
                }
            };
            parts.push(PartReport {
                label: part.label.to_string(),
                hypotheses,
                applicability: app,
                conclusions,
                violated,
            });
        }
        statements.push(StatementReport {
            id: spec.id.to_string(),
            citation: spec.citation.to_string(),
            applicability: parts[0].applicability.clone(),
            sound: parts.iter().all(|p| !p.violated),
            parts,
        });
    }
    let evaluations = engine.ctx.evaluations();
    let (lambda_iii, condition_iii) = match engine.iii {
        Some((l, c)) => (Some(l), Some(c)),
        None => (None, None),
    };
    Ok(TheoremReport {
        x: x.clone(),
        lambda,
        lambda_iii,
        condition_iii,
        checks: checks.into_iter().map(|(a, v)| (a.id().to_string(), v)).collect(),
        statements,
        fault: config.fault,
        evaluations,
    })
}

fn part_atoms(part: &Part) -> Vec<Atom> {
    let mut out = part.hypotheses.clone();
    match &part.kind {
        PartKind::Implies(cs) => out.extend(cs),
        PartKind::Equivalent(a, b) => out.extend([*a, *b]),
    }
    out
}

/// Every applicable part whose prediction failed.
pub fn cross_validate(report: &TheoremReport) -> Vec<Violation> {
    let mut out = Vec::new();
    for s in &report.statements {
        for part in s.parts.iter().filter(|p| p.violated) {
            for (c, st) in &part.conclusions {
                let failing = match part.label.as_str() {
                    l if l.contains("<=>") => *st != Status::Unknown,
                    _ => *st == Status::Fails,
                };
                if failing {
                    out.push(Violation {
                        statement: s.id.clone(),
                        part: part.label.clone(),
                        hypotheses: part.hypotheses.clone(),
                        conclusion: c.clone(),
                        witness: report.checks.get(c).cloned(),
                    });
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;
    use crate::problem::Problem;
    use crate::set_expr::parse_set_expr;

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

    fn statement<'r>(r: &'r TheoremReport, id: &str) -> &'r StatementReport {
        r.statements.iter().find(|s| s.id == id).unwrap()
    }

    #[test]
    fn catalog_is_complete() {
        let ids: Vec<&str> = statement_catalog().iter().map(|s| s.id).collect();
        assert_eq!(ids.len(), 16);
        for id in [
            "TH1.1", "TH1.2", "TH1.3", "TH1.4(i)", "TH1.4(ii)", "TH1.5", "TH1.6", "TH1.7", "COR1.1", "B1", "B2",
            "B3", "BS1", "BS2", "BS3", "LEM2.1",
        ] {
            assert!(ids.contains(&id), "{id}");
        }
        for a in Atom::ALL {
            assert_eq!(Atom::from_id(a.id()), Some(a));
        }
    }

    #[test]
    fn constant_cost_on_unit_interval() {
        let p = problem("[0, 1]", "[0, 1]", "0", "[0, 1]");
        let config = EngineConfig {
            plan: CheckPlan::quick(),
            ..EngineConfig::default()
        };
        let r = evaluate(&p, &Real::ratio(1, 2), &config).unwrap();
        assert!(cross_validate(&r).is_empty());
        for id in ["TH1.1", "B1", "B2", "B3", "LEM2.1"] {
            assert_eq!(statement(&r, id).applicability, Applicability::Applicable, "{id}");
        }
        let faulty = EngineConfig {
            fault: Some(Fault::FlipLsc),
            ..config
        };
        let r = evaluate(&p, &Real::ratio(1, 2), &faulty).unwrap();
        assert!(!cross_validate(&r).is_empty());
    }
}
