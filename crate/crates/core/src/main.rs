use std::path::Path;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::json;

use paramin::checks::CheckPlan;
use paramin::corpus::{self, CaseOutcome, CorpusError};
use paramin::problem::{load_problem, parse_point, ProblemFile};
use paramin::report::{analyze, value_curve, AnalysisReport};
use paramin::theorems::{Applicability, EngineConfig, Fault};

#[derive(Parser)]
#[command(name = "paramin", version, about = "Value functions and solution sets of parametric minimization problems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every check and statement at one parameter point.
    Analyze {
        /// Problem file, or the id of a corpus case.
        file: String,
        #[arg(long, allow_hyphen_values = true)]
        at: String,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        /// Random probes per adversarial search.
        #[arg(long)]
        budget: Option<u64>,
        /// Print the full JSON report.
        #[arg(long)]
        json: bool,
        /// Include wall-clock time in the report.
        #[arg(long)]
        timing: bool,
        /// Corrupt a verdict on purpose (`flip-lsc`) to exercise the soundness detector.
        #[arg(long, value_name = "FAULT")]
        inject_fault: Option<String>,
    },
    /// Print `x,v,attained` rows over a parameter range.
    Value {
        file: String,
        #[arg(long, num_args = 2, allow_hyphen_values = true, value_names = ["A", "B"])]
        range: Vec<String>,
        #[arg(long)]
        samples: usize,
    },
    /// The built-in example corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Compare measured verdicts with the expected ones.
    Run {
        case: Option<String>,
        #[arg(long)]
        json: bool,
    },
}

/// A failure reported as JSON on stderr with exit code 1.
struct Failure {
    kind: &'static str,
    message: String,
}

impl Failure {
    fn new(kind: &'static str, message: impl ToString) -> Failure {
        Failure {
            kind,
            message: message.to_string(),
        }
    }
}

fn seed() -> Result<u64, Failure> {
    match std::env::var("PARAMIN_SEED") {
        Ok(s) => s
            .trim()
            .parse()
            .map_err(|_| Failure::new("usage", format!("PARAMIN_SEED must be an unsigned integer, got `{s}`"))),
        Err(_) => Ok(0),
    }
}

fn plan() -> Result<CheckPlan, Failure> {
    let mut plan = CheckPlan::default();
    plan.sequences.seed = seed()?;
    Ok(plan)
}

/// Reads a problem file; a missing path that names a corpus case loads the case.
fn load(file: &str) -> Result<ProblemFile, Failure> {
    let path = Path::new(file);
    let text = if path.exists() {
        std::fs::read_to_string(path).map_err(|e| Failure::new("io", format!("{file}: {e}")))?
    } else if let Some(src) = corpus::source(file) {
        src.to_string()
    } else {
        return Err(Failure::new("io", format!("{file}: no such file or corpus case")));
    };
    let f = load_problem(&text).map_err(|e| Failure::new("load", e))?;
    if f.skip {
        return Err(Failure::new("load", format!("{file} is a documented stub and cannot be run")));
    }
    Ok(f)
}

fn point(field: &'static str, text: &str) -> Result<paramin::numeric::Real, Failure> {
    parse_point(field, text).map_err(|e| Failure::new("usage", e))
}

fn summary(r: &AnalysisReport) -> String {
    let mut out = format!(
        "problem {}  x = {}  v(x) = {}  attained = {}  argmin = {}\n",
        r.problem, r.x, r.value, r.attained, r.argmin
    );
    out.push_str(&format!("lambda = {}\n\nchecks\n", r.theorems.lambda));
    for (id, v) in &r.theorems.checks {
        out.push_str(&format!("  {id:<26} {:?}\n", v.status));
    }
    out.push_str("\nstatements\n");
    for s in &r.theorems.statements {
        let app = match &s.applicability {
            Applicability::Applicable => "applicable".to_string(),
            Applicability::Blocked { by } => format!("blocked by {}", by.join(", ")),
            Applicability::Unknown { by } => format!("undecided on {}", by.join(", ")),
        };
        out.push_str(&format!("  {:<10} {app}\n", s.id));
    }
    out.push_str(&format!("\nsoundness violations: {}\n", r.violations.len()));
    out
}

fn cmd_analyze(
    file: &str,
    at: &str,
    lambda: Option<&str>,
    budget: Option<u64>,
    as_json: bool,
    timing: bool,
    fault: Option<&str>,
) -> Result<ExitCode, Failure> {
    let fault = match fault {
        None => None,
        Some("flip-lsc") => Some(Fault::FlipLsc),
        Some(other) => return Err(Failure::new("usage", format!("unknown fault `{other}`; expected flip-lsc"))),
    };
    let f = load(file)?;
    let x = point("--at", at)?;
    if !f.problem.x_domain.member(&x) {
        return Err(Failure::new("usage", format!("--at {x} lies outside x_domain {}", f.problem.x_domain)));
    }
    let lambda = match lambda {
        Some(l) => Some(point("--lambda", l)?),
        None => f.lambda.clone(),
    };
    let mut plan = plan()?;
    if let Some(b) = budget {
        plan.sequences.adversarial_budget = b;
    }
    let config = EngineConfig {
        plan,
        lambda,
        fault,
    };
    let start = Instant::now();
    let mut report = analyze(&f.problem, &x, &config).map_err(|e| Failure::new("evaluation", e))?;
    if timing {
        report.wall_clock_ms = Some(start.elapsed().as_millis() as u64);
    }
    if as_json {
        println!("{}", serde_json::to_string_pretty(&report).expect("report serializes"));
    } else {
        print!("{}", summary(&report));
    }
    Ok(if report.violations.is_empty() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(2)
    })
}

fn cmd_value(file: &str, range: &[String], samples: usize) -> Result<ExitCode, Failure> {
    let f = load(file)?;
    let (a, b) = (point("--range", &range[0])?, point("--range", &range[1])?);
    if samples < 2 {
        return Err(Failure::new("usage", "--samples must be at least 2"));
    }
    if a > b {
        return Err(Failure::new("usage", format!("empty range [{a}, {b}]")));
    }
    let inside = paramin::sets::IntervalSet::closed(a.clone(), b.clone())
        .map(|r| r.is_subset(&f.problem.x_domain))
        .unwrap_or(false);
    if !inside {
        return Err(Failure::new(
            "usage",
            format!("[{a}, {b}] is not inside x_domain {}", f.problem.x_domain),
        ));
    }
    let csv = value_curve(&f.problem, &a, &b, samples, &plan()?.min).map_err(|e| Failure::new("evaluation", e))?;
    print!("{csv}");
    Ok(ExitCode::SUCCESS)
}

fn outcome_line(o: &CaseOutcome) -> String {
    if o.skipped {
        return format!("{:<8} skipped  ({})", o.case, o.anchor);
    }
    let matched = o.entries.iter().filter(|e| e.matched).count();
    let mut line = format!(
        "{:<8} {}  {matched}/{} expected, {} violations, {:.2}s",
        o.case,
        if o.passed() { "pass" } else { "FAIL" },
        o.entries.len(),
        o.violations.len(),
        o.elapsed.as_secs_f64()
    );
    for e in o.entries.iter().filter(|e| !e.matched) {
        line.push_str(&format!("\n    {}: expected {:?}, measured {:?}", e.key, e.expected, e.measured));
    }
    line
}

fn cmd_corpus(case: Option<&str>, as_json: bool) -> Result<ExitCode, Failure> {
    let config = EngineConfig {
        plan: plan()?,
        ..EngineConfig::default()
    };
    let results: Vec<Result<CaseOutcome, CorpusError>> = match case {
        Some(c) => {
            if corpus::source(c).is_none() {
                return Err(Failure::new("usage", CorpusError::UnknownCase(c.to_string())));
            }
            vec![corpus::run_case(c, &config)]
        }
        None => corpus::run_all(&config),
    };
    let mut outcomes = Vec::new();
    for r in results {
        outcomes.push(r.map_err(|e| Failure::new("evaluation", e))?);
    }
    let examples = |skipped: bool| {
        let mut ids: Vec<&str> = outcomes
            .iter()
            .filter(|o| o.skipped == skipped)
            .map(|o| corpus::example_of(&o.case))
            .collect();
        ids.dedup();
        ids.len()
    };
    let (executed, skipped) = (examples(false), examples(true));
    let cases = outcomes.iter().filter(|o| !o.skipped).count();
    let ok = outcomes.iter().all(|o| o.passed());
    if as_json {
        let doc = json!({
            "cases": outcomes,
            "executed": executed,
            "executed_cases": cases,
            "skipped": skipped,
            "passed": ok,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("summary serializes"));
    } else {
        for o in &outcomes {
            println!("{}", outcome_line(o));
        }
        println!(
            "{executed} executed ({cases} cases), {skipped} skipped, {}",
            if ok { "all matched" } else { "mismatches" }
        );
    }
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            let err = json!({"error": "usage", "message": e.to_string().trim()});
            eprintln!("{err}");
            return ExitCode::from(1);
        }
    };
    let result = match &cli.command {
        Command::Analyze {
            file,
            at,
            lambda,
            budget,
            json,
            timing,
            inject_fault,
        } => cmd_analyze(file, at, lambda.as_deref(), *budget, *json, *timing, inject_fault.as_deref()),
        Command::Value { file, range, samples } => cmd_value(file, range, *samples),
        Command::Corpus {
            action: CorpusAction::Run { case, json },
        } => cmd_corpus(case.as_deref(), *json),
    };
    match result {
        Ok(code) => code,
        Err(f) => {
            eprintln!("{}", json!({"error": f.kind, "message": f.message}));
            ExitCode::from(1)
        }
    }
}
