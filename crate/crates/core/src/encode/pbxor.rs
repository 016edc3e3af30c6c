//! The Tutte encoding with cardinality and comparison kept as linear
//! constraints and parity kept as native XOR lines.

use crate::cnf::{Lit, VarMap};
use crate::encode::pb::{PbConstraint, PbFormula, PbOp, XorConstraint};
use crate::encode::tutte::{tutte_ir, Constraint, TutteOptions};
use crate::error::Result;
use crate::graph::BicoloredGraph;

fn ones(lits: &[Lit]) -> impl Iterator<Item = (i64, Lit)> + '_ {
    lits.iter().map(|&l| (1, l))
}

/// Ids coincide with the Tutte CNF's named variables (Explicit selectors
/// follow them), so models decode with the same map.
pub fn emit_pbxor_tutte(g: &BicoloredGraph, opts: &TutteOptions) -> Result<(PbFormula, VarMap)> {
    let ir = tutte_ir(g, opts)?;
    let mut f = PbFormula {
        var_count: ir.vars.len() as u32,
        ..Default::default()
    };
    for (_, c) in &ir.constraints {
        match c {
            Constraint::Clause(lits) => f.linear.push(PbConstraint::clause(lits)),
            Constraint::ExactOne(lits) => f.linear.push(PbConstraint::over_lits(ones(lits), PbOp::Eq, 1)),
            Constraint::ExactK(lits, k) => f.linear.push(PbConstraint::over_lits(ones(lits), PbOp::Eq, *k as i64)),
            Constraint::Equiv(a, b) => f.linear.push(PbConstraint::over_lits([(1, *a), (-1, *b)], PbOp::Eq, 0)),
            Constraint::And(out, ins) => {
                for &i in ins {
                    f.linear.push(PbConstraint::clause(&[!*out, i]));
                }
                let back: Vec<Lit> = ins.iter().map(|&i| !i).chain([*out]).collect();
                f.linear.push(PbConstraint::clause(&back));
            }
            Constraint::Xor(out, ins) => f.xors.push(XorConstraint::definition(*out, ins)),
            Constraint::Greater(xs, ys) => {
                let terms = ones(xs).chain(ys.iter().map(|&l| (-1, l)));
                f.linear.push(PbConstraint::over_lits(terms, PbOp::Ge, 1));
            }
        }
    }
    f.set_meta("encoding", "tutte-pbxor");
    f.set_meta("graph", format!("{:016x}", g.fingerprint()));
    f.set_meta("legal", &opts.legal);
    f.set_meta("opt", opts.opt);
    f.set_meta(
        "format",
        "OPB linear constraints; `xor x1 ... xk = p ;` requires an odd (p = 1) or even (p = 0) number of true variables",
    );
    Ok((f, ir.vars))
}
