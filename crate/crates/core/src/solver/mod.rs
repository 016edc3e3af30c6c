//! Solver outcomes and the bridges that produce them: configurable external
//! subprocess solvers and the in-process reference solvers.

pub mod cdcl;
pub mod external;
pub mod internal;

use std::fmt;
use std::time::{Duration, Instant};

use serde::{Serialize, Serializer};

use crate::cnf::CnfFormula;
use crate::error::Result;

pub use external::{parse_transcript, AnswerGrammar, InputFormat, ModelStyle, SolverProfile, SolverRegistry};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UnknownReason {
    Timeout,
    Error(String),
    Skipped(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Status {
    Sat,
    Unsat,
    Unknown(UnknownReason),
}

impl Status {
    pub fn is_sat(&self) -> bool {
        matches!(self, Status::Sat)
    }

    pub fn is_unsat(&self) -> bool {
        matches!(self, Status::Unsat)
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, Status::Unknown(_))
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Sat => f.write_str("SAT"),
            Status::Unsat => f.write_str("UNSAT"),
            Status::Unknown(UnknownReason::Timeout) => f.write_str("UNKNOWN(timeout)"),
            Status::Unknown(UnknownReason::Error(_)) => f.write_str("UNKNOWN(error)"),
            Status::Unknown(UnknownReason::Skipped(_)) => f.write_str("UNKNOWN(skipped)"),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// What a solver reported besides its status.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    /// Truth value per variable id; slot 0 unused.
    Assignment(Vec<bool>),
    /// Atoms of an answer set.
    Atoms(Vec<String>),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveOutcome {
    pub status: Status,
    #[serde(skip)]
    pub model: Option<Model>,
    #[serde(rename = "time", serialize_with = "seconds")]
    pub wall_time: Duration,
    pub solver: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
}

fn seconds<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl SolveOutcome {
    pub fn assignment(&self) -> Option<&[bool]> {
        match &self.model {
            Some(Model::Assignment(a)) => Some(a),
            _ => None,
        }
    }

    pub fn atoms(&self) -> Option<&[String]> {
        match &self.model {
            Some(Model::Atoms(a)) => Some(a),
            _ => None,
        }
    }

    pub fn skipped(solver: &str, why: impl Into<String>) -> Self {
        let why = why.into();
        SolveOutcome {
            status: Status::Unknown(UnknownReason::Skipped(why.clone())),
            model: None,
            wall_time: Duration::ZERO,
            solver: solver.to_string(),
            message: Some(why),
        }
    }

    fn from_model(solver: &str, start: Instant, model: Option<Vec<bool>>) -> Self {
        SolveOutcome {
            status: if model.is_some() { Status::Sat } else { Status::Unsat },
            model: model.map(Model::Assignment),
            wall_time: start.elapsed(),
            solver: solver.to_string(),
            message: None,
        }
    }
}

/// Truth-table search; refuses formulas above 30 variables.
pub fn solve_internal_bruteforce(f: &CnfFormula) -> Result<SolveOutcome> {
    let start = Instant::now();
    let model = internal::brute_force(f)?;
    Ok(SolveOutcome::from_model("internal-bruteforce", start, model))
}

/// Complete DPLL search for formulas beyond the truth-table guard.
pub fn solve_internal_dpll(f: &CnfFormula) -> SolveOutcome {
    let start = Instant::now();
    let model = internal::dpll(f);
    SolveOutcome::from_model("internal-dpll", start, model)
}

/// Truth table for very small formulas, CDCL otherwise.
pub fn solve_internal(f: &CnfFormula) -> SolveOutcome {
    solve_internal_with_timeout(f, None)
}

/// As [`solve_internal`], reporting `UNKNOWN(timeout)` once `timeout` passes.
pub fn solve_internal_with_timeout(f: &CnfFormula, timeout: Option<Duration>) -> SolveOutcome {
    if f.var_count <= 16 {
        return solve_internal_bruteforce(f).expect("guard checked");
    }
    let start = Instant::now();
    let deadline = timeout.map(|t| start + t);
    match cdcl::Cdcl::new(f).with_deadline(deadline).run() {
        internal::SearchResult::Sat(m) => SolveOutcome::from_model("internal-cdcl", start, Some(m)),
        internal::SearchResult::Unsat => SolveOutcome::from_model("internal-cdcl", start, None),
        internal::SearchResult::Interrupted => SolveOutcome {
            status: Status::Unknown(UnknownReason::Timeout),
            model: None,
            wall_time: start.elapsed(),
            solver: "internal-cdcl".to_string(),
            message: None,
        },
    }
}
