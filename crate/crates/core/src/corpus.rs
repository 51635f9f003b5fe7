//! The built-in example corpus and its runner.

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::checks::Status;
use crate::problem::{load_problem, ExpectedStatus, LoadError, ProblemFile};
use crate::theorems::{cross_validate, evaluate, statement_catalog, Applicability, Atom, EngineConfig, EngineError, TheoremReport, Violation};

/// Corpus sources by case id, in run order.
pub const SOURCES: [(&str, &str); 10] = [
    ("ex4_1", include_str!("../corpus/ex4_1.toml")),
    ("ex4_2", include_str!("../corpus/ex4_2.toml")),
    ("ex4_3a", include_str!("../corpus/ex4_3a.toml")),
    ("ex4_3b", include_str!("../corpus/ex4_3b.toml")),
    ("ex4_4", include_str!("../corpus/ex4_4.toml")),
    ("ex4_5", include_str!("../corpus/ex4_5.toml")),
    ("ex4_6", include_str!("../corpus/ex4_6.toml")),
    ("ex4_7", include_str!("../corpus/ex4_7.toml")),
    ("ex4_8", include_str!("../corpus/ex4_8.toml")),
    ("ex4_9", include_str!("../corpus/ex4_9.toml")),
];

#[derive(Debug, thiserror::Error)]
pub enum CorpusError {
    #[error("unknown corpus case `{0}`")]
    UnknownCase(String),
    #[error("case {case}: {source}")]
    Load {
        case: String,
        #[source]
        source: LoadError,
    },
    #[error("case {case}: expected entry `{key}` names no check or statement")]
    UnknownKey { case: String, key: String },
    #[error("case {case}: no focus point")]
    NoFocus { case: String },
    #[error("case {case}: {source}")]
    Engine {
        case: String,
        #[source]
        source: EngineError,
    },
}

pub fn source(case: &str) -> Option<&'static str> {
    SOURCES.iter().find(|(id, _)| *id == case).map(|(_, s)| *s)
}

/// The example a case belongs to: variants such as `ex4_3a` and `ex4_3b`
/// share `ex4_3`.
pub fn example_of(case: &str) -> &str {
    case.trim_end_matches(|c: char| c.is_ascii_alphabetic())
}

pub fn case_ids() -> Vec<&'static str> {
    SOURCES.iter().map(|(id, _)| *id).collect()
}

pub fn load_case(case: &str) -> Result<ProblemFile, CorpusError> {
    let text = source(case).ok_or_else(|| CorpusError::UnknownCase(case.to_string()))?;
    load_problem(text).map_err(|source| CorpusError::Load {
        case: case.to_string(),
        source,
    })
}

/// Status of a check (`HOLDS`/`FAILS`/`UNKNOWN`) or of a statement
/// (applicable reads as `HOLDS`, blocked as `FAILS`).
pub fn measured(report: &TheoremReport, key: &str) -> Option<Status> {
    if let Some(v) = report.checks.get(key) {
        return Some(v.status);
    }
    report.statements.iter().find(|s| s.id == key).map(|s| match s.applicability {
        Applicability::Applicable => Status::Holds,
        Applicability::Blocked { .. } => Status::Fails,
        Applicability::Unknown { .. } => Status::Unknown,
    })
}

fn known_key(key: &str) -> bool {
    Atom::from_id(key).is_some() || statement_catalog().iter().any(|s| s.id == key)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntryOutcome {
    pub key: String,
    pub expected: ExpectedStatus,
    pub measured: Status,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseOutcome {
    pub case: String,
    pub skipped: bool,
    pub anchor: String,
    pub entries: Vec<EntryOutcome>,
    pub violations: Vec<Violation>,
    #[serde(skip)]
    pub report: Option<TheoremReport>,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CaseOutcome {
    pub fn passed(&self) -> bool {
        self.skipped || (self.entries.iter().all(|e| e.matched) && self.violations.is_empty())
    }
}

pub fn run_file(case: &str, file: &ProblemFile, config: &EngineConfig) -> Result<CaseOutcome, CorpusError> {
    let start = Instant::now();
    if file.skip {
        return Ok(CaseOutcome {
            case: case.to_string(),
            skipped: true,
            anchor: file.anchor.clone(),
            entries: Vec::new(),
            violations: Vec::new(),
            report: None,
            elapsed: start.elapsed(),
        });
    }
    if let Some(key) = file.expected.keys().find(|k| !known_key(k)) {
        return Err(CorpusError::UnknownKey {
            case: case.to_string(),
            key: key.clone(),
        });
    }
    let x = file.focus_x.clone().ok_or_else(|| CorpusError::NoFocus { case: case.to_string() })?;
    let config = EngineConfig {
        lambda: file.lambda.clone().or_else(|| config.lambda.clone()),
        ..config.clone()
    };
    let report = evaluate(&file.problem, &x, &config).map_err(|source| CorpusError::Engine {
        case: case.to_string(),
        source,
    })?;
    let entries = file
        .expected
        .iter()
        .map(|(key, expected)| {
            let measured = measured(&report, key).unwrap_or(Status::Unknown);
            let matched = matches!(
                (expected, measured),
                (ExpectedStatus::Holds, Status::Holds) | (ExpectedStatus::Fails, Status::Fails)
            );
            EntryOutcome {
                key: key.clone(),
                expected: *expected,
                measured,
                matched,
            }
        })
        .collect();
    Ok(CaseOutcome {
        case: case.to_string(),
        skipped: false,
        anchor: file.anchor.clone(),
        entries,
        violations: cross_validate(&report),
        report: Some(report),
        elapsed: start.elapsed(),
    })
}

pub fn run_case(case: &str, config: &EngineConfig) -> Result<CaseOutcome, CorpusError> {
    run_file(case, &load_case(case)?, config)
}

/// Runs every case in parallel; results come back in case order.
pub fn run_all(config: &EngineConfig) -> Vec<Result<CaseOutcome, CorpusError>> {
    case_ids().par_iter().map(|id| run_case(id, config)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_case_loads_with_known_keys() {
        for id in case_ids() {
            let f = load_case(id).unwrap();
            assert_eq!(f.problem.name, id);
            for key in f.expected.keys() {
                assert!(known_key(key), "{id}: {key}");
            }
            assert_eq!(f.skip, id == "ex4_2", "{id}");
            assert_eq!(f.skip, f.focus_x.is_none(), "{id}");
        }
        assert!(matches!(load_case("ex9_9"), Err(CorpusError::UnknownCase(_))));
    }
}
