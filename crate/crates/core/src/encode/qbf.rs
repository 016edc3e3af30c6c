//! `forall vc . exists edge, aux . (ValidColoring & LegalColoring) -> PM`.
//!
//! The antecedent is defined by a guard `g` whose value is fixed by the
//! universal assignment through fully defined auxiliaries. Every matching
//! clause carries `-g`, so an illegal coloring is won by the existential
//! player outright.

use std::fmt::Write as _;

use serde::Serialize;

use crate::cnf::{CnfBuilder, CnfFormula, Lit, VarMap, VarName};
use crate::coloring::{LegalColoringSpec, VertexColoring};
use crate::error::{Error, Result};
use crate::graph::BicoloredGraph;
use crate::solver::internal::Dpll;

/// Largest universal block the expansion evaluator accepts.
pub const MAX_EXPANSION_UNIVERSALS: usize = 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Quantifier {
    Forall,
    Exists,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfFormula {
    /// Outermost block first.
    pub prefix: Vec<(Quantifier, Vec<u32>)>,
    pub matrix: CnfFormula,
}

/// Result of the expansion evaluator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QbfAnswer {
    pub truth: bool,
    /// A universal assignment (indexed by id) with no existential answer.
    pub counterexample: Option<Vec<bool>>,
}

impl QbfFormula {
    pub fn to_qdimacs(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.matrix.meta {
            let _ = writeln!(out, "c {k}: {v}");
        }
        let _ = writeln!(out, "p cnf {} {}", self.matrix.var_count, self.matrix.clauses.len());
        for (q, ids) in &self.prefix {
            out.push_str(match q {
                Quantifier::Forall => "a",
                Quantifier::Exists => "e",
            });
            for id in ids {
                let _ = write!(out, " {id}");
            }
            out.push_str(" 0\n");
        }
        for clause in &self.matrix.clauses {
            for l in clause {
                let _ = write!(out, "{l} ");
            }
            out.push_str("0\n");
        }
        out
    }

    fn universals(&self) -> Result<&[u32]> {
        match self.prefix.as_slice() {
            [(Quantifier::Forall, a), (Quantifier::Exists, _)] | [(Quantifier::Forall, a)] => Ok(a),
            [(Quantifier::Exists, _)] | [] => Ok(&[]),
            _ => Err(Error::Unsupported(
                "expansion handles only forall-exists prefixes".into(),
            )),
        }
    }

    /// Decides the formula by solving the matrix once per universal
    /// assignment.
    pub fn evaluate_by_expansion(&self) -> Result<QbfAnswer> {
        let universals = self.universals()?;
        if universals.len() > MAX_EXPANSION_UNIVERSALS {
            return Err(Error::OracleGuard(format!(
                "{} universal variables exceeds the expansion cap of {MAX_EXPANSION_UNIVERSALS}",
                universals.len()
            )));
        }
        for mask in 0u64..1 << universals.len() {
            let assumptions: Vec<Lit> = universals
                .iter()
                .enumerate()
                .map(|(j, &id)| {
                    if mask >> j & 1 == 1 {
                        Lit::pos(id)
                    } else {
                        !Lit::pos(id)
                    }
                })
                .collect();
            if Dpll::with_assumptions(&self.matrix, &assumptions).solve().is_none() {
                let mut cex = vec![false; self.matrix.var_count as usize + 1];
                for l in assumptions {
                    cex[l.var() as usize] = l.is_positive();
                }
                return Ok(QbfAnswer {
                    truth: false,
                    counterexample: Some(cex),
                });
            }
        }
        Ok(QbfAnswer {
            truth: true,
            counterexample: None,
        })
    }
}

/// The coloring of a counterexample, if it is a valid coloring.
pub fn counterexample_coloring(assignment: &[bool], vars: &VarMap, n: usize, d: usize) -> Option<VertexColoring> {
    let mut colors = Vec::with_capacity(n);
    for v in 1..=n {
        let chosen: Vec<usize> = (1..=d)
            .filter(|&i| vars.get(&VarName::Vc(v, i)).is_some_and(|l| l.eval(assignment)))
            .collect();
        match chosen.as_slice() {
            [c] => colors.push(*c),
            _ => return None,
        }
    }
    Some(VertexColoring::new(colors))
}

pub fn build_qbf(g: &BicoloredGraph, spec: &LegalColoringSpec) -> Result<(QbfFormula, VarMap)> {
    if matches!(spec, LegalColoringSpec::Explicit { .. }) {
        return Err(Error::Unsupported("QBF encoding needs a GHZ, W or Dicke spec".into()));
    }
    if !g.removed().is_empty() {
        return Err(Error::InvalidGraph(
            "encoders need a graph without deleted vertices".into(),
        ));
    }
    spec.check_graph(g)?;
    let (n, d) = (g.n(), g.d());
    let mut vars = VarMap::new();
    let vc: Vec<Vec<Lit>> = (1..=n)
        .map(|v| (1..=d).map(|i| vars.named(VarName::Vc(v, i))).collect())
        .collect();
    let edges: Vec<Lit> = (0..g.edge_count()).map(|idx| vars.named(VarName::Edge(idx))).collect();
    let mut b = CnfBuilder::from_vars(vars, Default::default());

    let mut antecedent = Vec::new();
    for colors in &vc {
        let valid = b.aux("valid");
        if d == 1 {
            b.equiv(valid, colors[0]);
        } else {
            let count = b.totalizer(colors, 2, "valid");
            b.and_gate(valid, &[count[0], !count[1]]);
        }
        antecedent.push(valid);
    }
    let legal = b.aux("legal");
    match spec {
        LegalColoringSpec::Ghz { .. } => {
            let mut same = Vec::new();
            for v in 1..n {
                for i in 0..d {
                    let differ = b.aux("legal");
                    b.xor_to_cnf(differ, &[vc[v - 1][i], vc[v][i]], "legal");
                    same.push(!differ);
                }
            }
            b.and_gate(legal, &same);
        }
        LegalColoringSpec::W { .. } | LegalColoringSpec::Dicke { .. } => {
            let k = if let LegalColoringSpec::Dicke { k, .. } = spec {
                *k
            } else {
                1
            };
            let reds: Vec<Lit> = vc.iter().map(|c| c[0]).collect();
            let count = b.totalizer(&reds, k + 1, "legal");
            let mut parts = Vec::new();
            if k >= 1 {
                parts.push(count[k - 1]);
            }
            if let Some(&over) = count.get(k) {
                parts.push(!over);
            }
            b.and_gate(legal, &parts);
        }
        LegalColoringSpec::Explicit { .. } => unreachable!(),
    }
    antecedent.push(legal);
    let guard = b.aux("guard");
    b.and_gate(guard, &antecedent);

    let mut incident = vec![Vec::new(); n + 1];
    for (idx, e) in g.edges().iter().enumerate() {
        incident[e.u].push(edges[idx]);
        incident[e.v].push(edges[idx]);
        b.add_clause([!guard, !edges[idx], vc[e.u - 1][e.cu - 1]]);
        b.add_clause([!guard, !edges[idx], vc[e.v - 1][e.cv - 1]]);
    }
    for lits in &incident[1..] {
        b.add_clause(lits.iter().copied().chain([!guard]));
        for (i, &x) in lits.iter().enumerate() {
            for &y in &lits[i + 1..] {
                b.add_clause([!guard, !x, !y]);
            }
        }
    }

    let (mut matrix, vars) = b.finish();
    matrix.set_meta("encoding", "qbf");
    matrix.set_meta("graph", format!("{:016x}", g.fingerprint()));
    matrix.set_meta("legal", spec);
    let universal_count = (n * d) as u32;
    let prefix = vec![
        (Quantifier::Forall, (1..=universal_count).collect()),
        (Quantifier::Exists, (universal_count + 1..=matrix.var_count).collect()),
    ];
    Ok((QbfFormula { prefix, matrix }, vars))
}
