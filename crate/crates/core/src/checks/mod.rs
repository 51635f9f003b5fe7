//! Sequence-based checks of semicontinuity and compactness properties.
//!
//! Every check returns a three-valued [`Verdict`]. A `FAILS` verdict carries
//! a [`Witness`]: finite sequence prefixes together with the claim they
//! violate, enough to recompute the violation margin without the search
//! state (see [`replay`]).

use serde::{Deserialize, Serialize};

use crate::minimizer::{MinPlan, TruncationError};
use crate::numeric::Real;
use crate::problem::ProblemError;

mod compact;
mod context;
mod limits;
mod maps;
mod pointwise;
mod replay;
mod sequences;
mod value;

pub use compact::{
    check_argmin_compact, check_condition_iii, check_inf_compact, check_k_inf_compact,
    check_kn_inf_compact_at, check_set_compact, ConditionIii,
};
pub use context::Ctx;
pub use maps::{check_closed_graph, check_condition_iv, check_map_lsc_at, check_map_usc_at};
pub use pointwise::{
    check_cost_lsc_on_graph, check_cost_usc_on_graph, check_joint_continuity, check_lsc_at,
    check_usc_at, Semicontinuity,
};
pub use replay::replay;
pub use sequences::{Scheme, SequencePlan, Tag};
pub use value::check_value_below;

/// Margins below this are treated as refinement noise.
pub const TOL_CHECK: f64 = 1e-7;

/// Number of trailing sequence terms that decide a limit.
pub const TAIL: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Holds,
    Fails,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Holds => "HOLDS",
            Status::Fails => "FAILS",
            Status::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    ViolatingSequence,
    EscapingSequence,
    StrayAccumulationPoint,
    NeighborhoodGap,
}

/// The λ-truncation a witness was found on.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub lambda: Real,
    pub anchor: Real,
}

/// A scalar function sampled along a sequence.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Subject {
    /// `u` at points of the product space; `on_graph` restricts to `y ∈ Φ(x)`.
    Cost { on_graph: bool },
    /// The value function `v`.
    Value,
    /// A function of `x` alone.
    Scalar { f: crate::expr::Expr },
}

/// A set attached to each parameter value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SetSubject {
    Phi,
    ArgMin,
    Level { lambda: Real },
}

/// What a witness claims to violate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Claim {
    /// `liminf g(p_n) < g(a)`.
    Lsc { subject: Subject, x: Real, y: Option<Real> },
    /// `limsup g(p_n) > g(a)`.
    Usc { subject: Subject, x: Real, y: Option<Real> },
    /// `dist(y, F(x_n))` stays away from zero for some `y ∈ F(x)`.
    MapLsc { map: SetSubject, x: Real, y: Real },
    /// `excess(F(x_n), F(x))` stays away from zero.
    MapUsc { map: SetSubject, x: Real },
    /// `y_n ∈ M(x_n)` converges to `y ∉ T(x)`.
    Stray { member_of: SetSubject, target: SetSubject, x: Real, y: Real },
    /// `y_n ∈ M(x_n)` with `|y_n| → ∞`.
    Escape { member_of: SetSubject, x: Real },
    /// `Φ(x_n)` stays away from `Φ*(x)`.
    Gap { x: Real },
    /// `D(λ)` is empty along `x_n`: `v(x_n) > λ`.
    EmptyLevel { lambda: Real },
    /// `y_n ∈ Φ(x)` is minimizing while `Φ*(x) = ∅`.
    Unattained { x: Real },
    /// No `y ∈ Φ(x)` has `u(x,y) < λ` (`strict`) or `u(x,y) ≤ λ`; without
    /// `λ`, `u(x,·) ≡ +∞` on `Φ(x)`.
    NoneBelow { x: Real, lambda: Option<Real>, strict: bool },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub kind: WitnessKind,
    pub scheme: String,
    pub truncation: Option<Truncation>,
    pub claim: Claim,
    pub x_seq: Vec<Real>,
    pub y_seq: Option<Vec<Real>>,
    pub limit_claim: String,
    #[serde(with = "float_text")]
    pub violation_margin: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub status: Status,
    pub witness: Option<Box<Witness>>,
    /// Violation margin for `FAILS`; the largest sub-threshold deficit seen otherwise.
    #[serde(with = "float_text")]
    pub margin: f64,
    pub budget_used: u64,
    pub note: String,
}

impl Verdict {
    pub fn holds(margin: f64, budget_used: u64) -> Verdict {
        Verdict {
            status: Status::Holds,
            witness: None,
            margin,
            budget_used,
            note: String::new(),
        }
    }

    pub fn unknown(note: impl Into<String>, budget_used: u64) -> Verdict {
        Verdict {
            status: Status::Unknown,
            witness: None,
            margin: 0.0,
            budget_used,
            note: note.into(),
        }
    }

    pub fn fails(w: Witness, budget_used: u64) -> Verdict {
        Verdict {
            status: Status::Fails,
            margin: w.violation_margin,
            witness: Some(Box::new(w)),
            budget_used,
            note: String::new(),
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Verdict {
        self.note = note.into();
        self
    }

    /// Conjunction: the first failure wins, then any unknown.
    pub fn all(parts: impl IntoIterator<Item = Verdict>) -> Verdict {
        let mut margin = f64::NEG_INFINITY;
        let mut used = 0;
        let mut unknown: Option<Verdict> = None;
        for v in parts {
            used += v.budget_used;
            match v.status {
                Status::Fails => return Verdict { budget_used: used, ..v },
                Status::Unknown => {
                    unknown.get_or_insert(v);
                }
                Status::Holds => margin = margin.max(v.margin),
            }
        }
        match unknown {
            Some(u) => Verdict { budget_used: used, ..u },
            None => Verdict::holds(margin.max(0.0), used),
        }
    }

    pub fn is(&self, s: Status) -> bool {
        self.status == s
    }
}

/// Configuration shared by all checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckPlan {
    pub sequences: SequencePlan,
    pub min: MinPlan,
    pub tol_check: f64,
    /// Grid size used when sampling sets such as `Φ*(x)`.
    pub set_grid: usize,
    /// Grid size used when sampling a parameter window.
    pub window_grid: usize,
}

impl Default for CheckPlan {
    fn default() -> Self {
        CheckPlan {
            sequences: SequencePlan::default(),
            min: MinPlan::default(),
            tol_check: TOL_CHECK,
            set_grid: 33,
            window_grid: 16,
        }
    }
}

impl CheckPlan {
    /// A cheaper plan for bulk randomized runs.
    pub fn quick() -> CheckPlan {
        CheckPlan {
            sequences: SequencePlan {
                depth: 32,
                ..SequencePlan::default()
            },
            min: MinPlan {
                grid_points: 65,
                tail_depth: 24,
                ..MinPlan::default()
            },
            set_grid: 9,
            window_grid: 6,
            ..CheckPlan::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Truncation(#[from] TruncationError),
    #[error("{0}")]
    Precondition(String),
    #[error("witness does not replay: {0}")]
    Replay(String),
}

/// `f64` fields that may be infinite are written as strings so the JSON
/// stays valid. Finite values keep 12 significant digits.
pub mod float_text {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn round12(v: f64) -> f64 {
        if v.is_finite() {
            format!("{v:.11e}").parse().unwrap_or(v)
        } else {
            v
        }
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(round12(*v))
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("+inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "+inf" | "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                _ => Err(serde::de::Error::custom(format!("invalid number {t}"))),
            },
        }
    }
}

#[cfg(test)]
mod tests;
