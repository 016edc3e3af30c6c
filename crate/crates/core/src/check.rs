//! End-to-end FORALL-PMVC decisions by any of the supported methods.

use std::fmt;
use std::io::Write as _;
use std::str::FromStr;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::coloring::{LegalColoringSpec, VertexColoring};
use crate::encode::{self, qbf, TutteOptions, Witness};
use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Vertex};
use crate::matching::{enum_blossom, Decision};
use crate::oracle;
use crate::solver::{self, InputFormat, SolveOutcome, SolverProfile, Status, UnknownReason};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    EnumBlossom,
    Tutte,
    TuttePbxor,
    TutteAsp,
    Qbf,
    Oracle,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::EnumBlossom,
        Method::Tutte,
        Method::TuttePbxor,
        Method::TutteAsp,
        Method::Qbf,
        Method::Oracle,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::EnumBlossom => "enum-blossom",
            Method::Tutte => "tutte",
            Method::TuttePbxor => "tutte-pbxor",
            Method::TutteAsp => "tutte-asp",
            Method::Qbf => "qbf",
            Method::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tutte-cnf" => Ok(Method::Tutte),
            _ => Method::ALL
                .into_iter()
                .find(|m| m.name() == s)
                .ok_or_else(|| Error::InvalidParams(format!("unknown method {s:?}"))),
        }
    }
}

/// Where formulas are solved.
#[derive(Clone, Debug, PartialEq)]
pub enum Backend {
    Internal,
    External(SolverProfile),
}

impl Backend {
    pub fn name(&self) -> &str {
        match self {
            Backend::Internal => "internal",
            Backend::External(p) => &p.name,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOptions {
    pub method: Method,
    pub opt: bool,
    pub gs: Option<Vec<Vertex>>,
    pub backend: Backend,
    pub timeout: Option<Duration>,
    /// Shuffle seed for enum-blossom.
    pub seed: Option<u64>,
}

impl CheckOptions {
    pub fn new(method: Method) -> Self {
        CheckOptions {
            method,
            opt: false,
            gs: None,
            backend: Backend::Internal,
            timeout: None,
            seed: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "UPPERCASE")]
pub enum Verdict {
    Satisfies,
    Violated {
        #[serde(skip_serializing_if = "Option::is_none")]
        coloring: Option<VertexColoring>,
        #[serde(skip_serializing_if = "Option::is_none")]
        witness: Option<Witness>,
    },
    Unknown {
        reason: String,
    },
}

impl Verdict {
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Satisfies => "SATISFIES",
            Verdict::Violated { .. } => "VIOLATED",
            Verdict::Unknown { .. } => "UNKNOWN",
        }
    }

    /// 0 satisfies, 1 violated, 2 unknown.
    pub fn exit_code(&self) -> i32 {
        match self {
            Verdict::Satisfies => 0,
            Verdict::Violated { .. } => 1,
            Verdict::Unknown { .. } => 2,
        }
    }

    pub fn is_known(&self) -> bool {
        !matches!(self, Verdict::Unknown { .. })
    }

    fn from_decision(d: Decision) -> Self {
        match d {
            Decision::Satisfies => Verdict::Satisfies,
            Decision::Violated(c) => Verdict::Violated {
                coloring: Some(c),
                witness: None,
            },
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub method: Method,
    pub solver: String,
    #[serde(flatten)]
    pub verdict: Verdict,
    #[serde(serialize_with = "seconds")]
    pub time: Duration,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub status: Option<Status>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub named_vars: Option<usize>,
}

fn seconds<S: serde::Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

fn unknown_from(status: &Status, message: Option<&str>) -> Verdict {
    let reason = match status {
        Status::Unknown(UnknownReason::Skipped(why)) => format!("skipped: {why}"),
        Status::Unknown(UnknownReason::Timeout) => "timeout".to_string(),
        _ => format!("solver error: {}", message.unwrap_or("no detail")),
    };
    Verdict::Unknown { reason }
}

/// Writes `text` to a temporary file and runs `profile` on it.
pub fn solve_text(profile: &SolverProfile, text: &str, format: InputFormat, timeout: Option<Duration>) -> SolveOutcome {
    let suffix = match format {
        InputFormat::Cnf => ".cnf",
        InputFormat::Qdimacs => ".qdimacs",
        InputFormat::Opb => ".opb",
        InputFormat::Pbxor => ".pbxor",
        InputFormat::Lp => ".lp",
    };
    let written = tempfile::Builder::new()
        .prefix("pmvc-")
        .suffix(suffix)
        .tempfile()
        .and_then(|mut f| f.write_all(text.as_bytes()).map(|_| f));
    match written {
        Ok(file) => {
            let mut profile = profile.clone();
            if let Some(t) = timeout {
                profile.timeout_secs = t.as_secs_f64();
            }
            profile.solve(file.path(), format)
        }
        Err(e) => SolveOutcome::skipped(&profile.name, format!("cannot write input file: {e}")),
    }
}

/// A SAT model turned into a verified witness, or an UNKNOWN verdict.
fn verified(g: &BicoloredGraph, spec: &LegalColoringSpec, w: Result<Witness>) -> Verdict {
    match w {
        Ok(w) if encode::verify_witness(g, spec, &w) => Verdict::Violated {
            coloring: Some(w.coloring.clone()),
            witness: Some(w),
        },
        Ok(w) => Verdict::Unknown {
            reason: format!("decoded witness failed verification: {w:?}"),
        },
        Err(e) => Verdict::Unknown { reason: e.to_string() },
    }
}

pub fn check(g: &BicoloredGraph, spec: &LegalColoringSpec, opts: &CheckOptions) -> Result<CheckReport> {
    let start = Instant::now();
    let tutte_opts = || {
        TutteOptions::new(spec.clone())
            .with_opt(opts.opt)
            .with_gs(opts.gs.clone())
    };
    let mut status = None;
    let mut named_vars = None;
    let mut solver_name = opts.backend.name().to_string();
    let verdict = match opts.method {
        Method::EnumBlossom => {
            solver_name = "blossom".into();
            Verdict::from_decision(enum_blossom(g, spec, opts.seed)?)
        }
        Method::Oracle => {
            solver_name = "brute-force".into();
            Verdict::from_decision(oracle::brute_forall_pmvc(g, spec)?)
        }
        Method::Tutte => {
            let (f, vars) = encode::build_tutte(g, &tutte_opts())?;
            named_vars = Some(vars.named_count());
            let out = match &opts.backend {
                Backend::Internal => solver::solve_internal_with_timeout(&f, opts.timeout),
                Backend::External(p) => solve_text(p, &f.to_dimacs(), InputFormat::Cnf, opts.timeout),
            };
            solver_name = out.solver.clone();
            status = Some(out.status.clone());
            match (&out.status, out.assignment()) {
                (Status::Sat, Some(m)) => verified(g, spec, encode::decode_witness(m, &vars)),
                (Status::Unsat, _) => Verdict::Satisfies,
                _ => unknown_from(&out.status, out.message.as_deref()),
            }
        }
        Method::TuttePbxor => {
            let (f, vars) = encode::emit_pbxor_tutte(g, &tutte_opts())?;
            named_vars = Some(vars.named_count());
            let out = match &opts.backend {
                Backend::Internal => solver::solve_internal_with_timeout(&f.to_cnf()?, opts.timeout),
                Backend::External(p) if p.accepts(InputFormat::Pbxor) => {
                    solve_text(p, &f.to_pbxor(), InputFormat::Pbxor, opts.timeout)
                }
                Backend::External(p) if p.accepts(InputFormat::Opb) => {
                    solve_text(p, &f.xors_as_linear().to_opb()?, InputFormat::Opb, opts.timeout)
                }
                Backend::External(p) => SolveOutcome::skipped(&p.name, "profile reads neither PB+XOR nor OPB"),
            };
            solver_name = out.solver.clone();
            status = Some(out.status.clone());
            match (&out.status, out.assignment()) {
                (Status::Sat, Some(m)) => verified(g, spec, encode::decode_witness(m, &vars)),
                (Status::Sat, None) => Verdict::Violated {
                    coloring: None,
                    witness: None,
                },
                (Status::Unsat, _) => Verdict::Satisfies,
                _ => unknown_from(&out.status, out.message.as_deref()),
            }
        }
        Method::TutteAsp => {
            let program = encode::emit_asp_tutte(g, &tutte_opts())?;
            let out = match &opts.backend {
                Backend::External(p) if p.accepts(InputFormat::Lp) => {
                    solve_text(p, &program, InputFormat::Lp, opts.timeout)
                }
                other => SolveOutcome::skipped(other.name(), "ASP needs an external answer-set solver"),
            };
            solver_name = out.solver.clone();
            status = Some(out.status.clone());
            match (&out.status, out.atoms()) {
                (Status::Sat, Some(atoms)) => verified(g, spec, encode::decode_answer(atoms, g.n())),
                (Status::Unsat, _) => Verdict::Satisfies,
                _ => unknown_from(&out.status, out.message.as_deref()),
            }
        }
        Method::Qbf => {
            let (q, vars) = encode::build_qbf(g, spec)?;
            match &opts.backend {
                Backend::Internal => {
                    solver_name = "internal-expansion".into();
                    let ans = q.evaluate_by_expansion()?;
                    if ans.truth {
                        Verdict::Satisfies
                    } else {
                        let coloring = ans
                            .counterexample
                            .and_then(|cex| qbf::counterexample_coloring(&cex, &vars, g.n(), g.d()));
                        Verdict::Violated {
                            coloring,
                            witness: None,
                        }
                    }
                }
                Backend::External(p) => {
                    let out = if p.accepts(InputFormat::Qdimacs) {
                        solve_text(p, &q.to_qdimacs(), InputFormat::Qdimacs, opts.timeout)
                    } else {
                        SolveOutcome::skipped(&p.name, "profile does not read QDIMACS")
                    };
                    status = Some(out.status.clone());
                    match &out.status {
                        Status::Sat => Verdict::Satisfies,
                        Status::Unsat => Verdict::Violated {
                            coloring: None,
                            witness: None,
                        },
                        s => unknown_from(s, out.message.as_deref()),
                    }
                }
            }
        }
    };
    Ok(CheckReport {
        method: opts.method,
        solver: solver_name,
        verdict,
        time: start.elapsed(),
        status,
        named_vars,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn methods_agree_on_dicke_6_2() {
        let g = generate::dicke_graph(6, 2).unwrap();
        let spec = LegalColoringSpec::dicke(6, 2).unwrap();
        for m in [
            Method::EnumBlossom,
            Method::Oracle,
            Method::Tutte,
            Method::TuttePbxor,
            Method::Qbf,
        ] {
            let r = check(&g, &spec, &CheckOptions::new(m)).unwrap();
            assert_eq!(r.verdict, Verdict::Satisfies, "{m}");
        }
        let r = check(&g, &spec, &CheckOptions::new(Method::TutteAsp)).unwrap();
        assert!(!r.verdict.is_known());
    }

    #[test]
    fn tutte_violation_carries_verified_witness() {
        let g = generate::dicke_graph(6, 2).unwrap();
        let idx = generate::required_bicolored_edges(&g, 2)[0];
        let g = g.without_edge(idx);
        let spec = LegalColoringSpec::dicke(6, 2).unwrap();
        let mut opts = CheckOptions::new(Method::Tutte);
        opts.opt = true;
        let r = check(&g, &spec, &opts).unwrap();
        match &r.verdict {
            Verdict::Violated { witness: Some(w), .. } => assert!(encode::verify_witness(&g, &spec, w)),
            other => panic!("expected a witness, got {other:?}"),
        }
        assert_eq!(r.verdict.exit_code(), 1);
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert_eq!("tutte-cnf".parse::<Method>().unwrap(), Method::Tutte);
        assert!("nope".parse::<Method>().is_err());
    }
}
