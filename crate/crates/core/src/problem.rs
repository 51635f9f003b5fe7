//! Parametric minimization problems and the problem-file loader.

use std::collections::BTreeMap;

use serde::Deserialize;
use thiserror::Error;

use crate::expr::{parse_expr, Env, EvalError, Expr, ParseError};
use crate::numeric::{ExtendedReal, Real};
use crate::set_expr::{parse_set_expr, SetEvalError, SetExpr};
use crate::sets::IntervalSet;

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("problem file is not valid TOML: {0}")]
    Toml(#[from] toml::de::Error),
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("field `{field}`: {source}")]
    Parse {
        field: &'static str,
        #[source]
        source: ParseError,
    },
    #[error("field `{field}` must be a constant set: {source}")]
    Domain {
        field: &'static str,
        #[source]
        source: SetEvalError,
    },
    #[error("phi({x}) could not be evaluated: {source}")]
    Phi {
        x: String,
        #[source]
        source: SetEvalError,
    },
    #[error("phi({x}) is empty but nonempty_required = true")]
    EmptyImage { x: String },
    #[error("phi({x}) = {set} is not contained in y_domain = {y_domain}")]
    OutsideY {
        x: String,
        set: String,
        y_domain: String,
    },
}

/// Error from evaluating the cost or the feasible mapping at a point.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ProblemError {
    #[error("u({x}, {y}): {source}")]
    Cost {
        x: String,
        y: String,
        #[source]
        source: EvalError,
    },
    #[error("phi({x}): {source}")]
    Phi {
        x: String,
        #[source]
        source: SetEvalError,
    },
}

/// The data `(X, Y, Φ, u)` of a parametric minimization problem.
#[derive(Clone, Debug)]
pub struct Problem {
    pub name: String,
    /// Analysis window in the parameter space.
    pub x_domain: IntervalSet,
    pub y_domain: IntervalSet,
    pub u: Expr,
    pub phi: SetExpr,
    pub notes: String,
    pub nonempty_required: bool,
    /// `is_rat` of an approximate value answers "irrational" instead of failing.
    pub float_is_irrational: bool,
}

impl Problem {
    /// Builds and validates a problem over the sample grid of `x_domain`.
    pub fn new(
        name: impl Into<String>,
        x_domain: IntervalSet,
        y_domain: IntervalSet,
        u: Expr,
        phi: SetExpr,
    ) -> Result<Problem, LoadError> {
        let p = Problem {
            name: name.into(),
            x_domain,
            y_domain,
            u,
            phi,
            notes: String::new(),
            nonempty_required: true,
            float_is_irrational: false,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn phi_at(&self, x: &Real) -> Result<IntervalSet, ProblemError> {
        self.phi.eval(x).map_err(|source| ProblemError::Phi {
            x: x.to_string(),
            source,
        })
    }

    pub fn cost(&self, x: &Real, y: &Real) -> Result<ExtendedReal, ProblemError> {
        let env = Env {
            x,
            y,
            float_is_irrational: self.float_is_irrational,
        };
        self.u.eval(&env).map_err(|source| ProblemError::Cost {
            x: x.to_string(),
            y: y.to_string(),
            source,
        })
    }

    /// Exact sample points of the parameter window: endpoints of each bounded
    /// piece plus a uniform grid of `per_piece` interior points.
    pub fn x_samples(&self, per_piece: usize) -> Vec<Real> {
        sample_grid(&self.x_domain, per_piece)
    }

    fn validate(&self) -> Result<(), LoadError> {
        for x in self.x_samples(64) {
            let s = self.phi.eval(&x).map_err(|source| LoadError::Phi {
                x: x.to_string(),
                source,
            })?;
            if s.is_empty() && self.nonempty_required {
                return Err(LoadError::EmptyImage { x: x.to_string() });
            }
            if !s.is_subset(&self.y_domain) {
                return Err(LoadError::OutsideY {
                    x: x.to_string(),
                    set: s.to_string(),
                    y_domain: self.y_domain.to_string(),
                });
            }
        }
        Ok(())
    }
}

/// The slice of a problem at a fixed parameter: the feasible set and the
/// cost `y ↦ u(anchor, y)`.
#[derive(Clone, Debug)]
pub struct Section<'a> {
    /// Parameter the section belongs to.
    pub z: Real,
    pub feasible: IntervalSet,
    /// First argument fed to `u`; differs from `z` for patched truncations.
    cost_x: Real,
    u: &'a Expr,
    float_is_irrational: bool,
    evaluations: std::cell::Cell<u64>,
}

impl<'a> Section<'a> {
    pub fn new(z: Real, feasible: IntervalSet, cost_x: Real, u: &'a Expr, float_is_irrational: bool) -> Self {
        Section {
            z,
            feasible,
            cost_x,
            u,
            float_is_irrational,
            evaluations: std::cell::Cell::new(0),
        }
    }

    /// The cost reads `is_rat`, so exact and float arguments are not interchangeable.
    pub fn cost_reads_rationality(&self) -> bool {
        self.u.mentions_rationality()
    }

    pub fn cost(&self, y: &Real) -> Result<ExtendedReal, ProblemError> {
        self.evaluations.set(self.evaluations.get() + 1);
        let env = Env {
            x: &self.cost_x,
            y,
            float_is_irrational: self.float_is_irrational,
        };
        self.u.eval(&env).map_err(|source| ProblemError::Cost {
            x: self.cost_x.to_string(),
            y: y.to_string(),
            source,
        })
    }

    pub fn cost_x(&self) -> &Real {
        &self.cost_x
    }

    pub fn evaluations(&self) -> u64 {
        self.evaluations.get()
    }

    pub fn u_ref(&self) -> &'a Expr {
        self.u
    }

    pub fn float_is_irrational(&self) -> bool {
        self.float_is_irrational
    }
}

/// Anything that has a feasible mapping and a cost over a parameter window.
pub trait Parametric: Sync {
    fn name(&self) -> &str;
    fn x_domain(&self) -> &IntervalSet;
    fn section(&self, z: &Real) -> Result<Section<'_>, ProblemError>;
    /// Cost at an arbitrary point of the product space.
    fn cost_at(&self, z: &Real, y: &Real) -> Result<ExtendedReal, ProblemError> {
        self.section(z)?.cost(y)
    }
    /// The cost or mapping reads `is_rat`, so sample sequences should include
    /// tagged rational and irrational variants.
    fn mentions_rationality(&self) -> bool;
    /// `(λ, x)` when this is the λ-truncation anchored at `x`.
    fn truncation(&self) -> Option<(Real, Real)> {
        None
    }
}

impl Parametric for Problem {
    fn name(&self) -> &str {
        &self.name
    }

    fn x_domain(&self) -> &IntervalSet {
        &self.x_domain
    }

    fn section(&self, z: &Real) -> Result<Section<'_>, ProblemError> {
        Ok(Section::new(z.clone(), self.phi_at(z)?, z.clone(), &self.u, self.float_is_irrational))
    }

    fn cost_at(&self, z: &Real, y: &Real) -> Result<ExtendedReal, ProblemError> {
        self.cost(z, y)
    }

    fn mentions_rationality(&self) -> bool {
        self.u.mentions_rationality() || self.phi.mentions_rationality()
    }
}

/// Exact grid over the bounded parts of `s`: members among the endpoints and
/// `n` evenly spaced interior points per bounded piece. Unbounded pieces are
/// sampled over a unit-width stretch next to their finite end.
pub fn sample_grid(s: &IntervalSet, n: usize) -> Vec<Real> {
    let mut out = Vec::new();
    for piece in s.pieces() {
        let (lo, hi) = match (piece.lo().as_real(), piece.hi().as_real()) {
            (Some(a), Some(b)) => (a.clone(), b.clone()),
            (Some(a), None) => (a.clone(), a.add(&Real::one())),
            (None, Some(b)) => (b.sub(&Real::one()), b.clone()),
            (None, None) => (Real::int(-1), Real::one()),
        };
        if piece.is_singleton() {
            out.push(lo);
            continue;
        }
        if piece.lo_closed() {
            out.push(lo.clone());
        }
        let width = hi.sub(&lo);
        for k in 1..=n {
            let t = Real::ratio(k as i64, n as i64 + 1);
            out.push(lo.add(&width.mul(&t)));
        }
        if piece.hi_closed() {
            out.push(hi);
        }
    }
    out
}

/// Verdict expected by a corpus file.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, serde::Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ExpectedStatus {
    Holds,
    Fails,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFile {
    name: String,
    x_domain: String,
    y_domain: String,
    u: String,
    phi: String,
    #[serde(default = "default_true")]
    nonempty_required: bool,
    #[serde(default)]
    float_is_irrational: bool,
    #[serde(default)]
    notes: String,
    #[serde(default)]
    skip: bool,
    #[serde(default)]
    anchor: String,
    focus: Option<RawFocus>,
    #[serde(default)]
    expected: BTreeMap<String, ExpectedStatus>,
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFocus {
    x: String,
    lambda: Option<String>,
}

/// A parsed problem file: the problem plus optional corpus metadata.
#[derive(Clone, Debug)]
pub struct ProblemFile {
    pub problem: Problem,
    pub focus_x: Option<Real>,
    pub lambda: Option<Real>,
    pub expected: BTreeMap<String, ExpectedStatus>,
    pub anchor: String,
    pub skip: bool,
}

fn constant_set(field: &'static str, text: &str) -> Result<IntervalSet, LoadError> {
    let s = parse_set_expr(text).map_err(|source| LoadError::Parse { field, source })?;
    s.eval(&Real::zero())
        .map_err(|source| LoadError::Domain { field, source })
}

/// Parses a constant expression such as `1/2` or `sqrt2/2`.
pub fn parse_point(field: &'static str, text: &str) -> Result<Real, LoadError> {
    let e = parse_expr(text).map_err(|source| LoadError::Parse { field, source })?;
    let z = Real::zero();
    e.eval_point(&Env::new(&z, &z))
        .map_err(|e| LoadError::Schema(format!("field `{field}`: {e}")))
}

/// Parses and validates a problem document.
///
/// Skipped documents (non-executable corpus entries) are parsed but not
/// validated against their feasible mapping.
pub fn load_problem(document: &str) -> Result<ProblemFile, LoadError> {
    let raw: RawFile = toml::from_str(document)?;
    let x_domain = constant_set("x_domain", &raw.x_domain)?;
    let y_domain = constant_set("y_domain", &raw.y_domain)?;
    if x_domain.is_empty() {
        return Err(LoadError::Schema("x_domain is empty".into()));
    }
    let u = parse_expr(&raw.u).map_err(|source| LoadError::Parse { field: "u", source })?;
    let phi = parse_set_expr(&raw.phi).map_err(|source| LoadError::Parse { field: "phi", source })?;
    let problem = Problem {
        name: raw.name,
        x_domain,
        y_domain,
        u,
        phi,
        notes: raw.notes,
        nonempty_required: raw.nonempty_required,
        float_is_irrational: raw.float_is_irrational,
    };
    if !raw.skip {
        problem.validate()?;
    }
    let (focus_x, lambda) = match raw.focus {
        Some(f) => {
            let x = parse_point("focus.x", &f.x)?;
            if !problem.x_domain.member(&x) {
                return Err(LoadError::Schema(format!("focus.x = {x} lies outside x_domain")));
            }
            let l = f.lambda.as_deref().map(|l| parse_point("focus.lambda", l)).transpose()?;
            (Some(x), l)
        }
        None => (None, None),
    };
    Ok(ProblemFile {
        problem,
        focus_x,
        lambda,
        expected: raw.expected,
        anchor: raw.anchor,
        skip: raw.skip,
    })
}
