//! Perfect matching as one variable per edge with exactly one chosen edge at
//! every vertex.

use crate::cnf::{CnfBuilder, CnfFormula, Lit, VarMap, VarName};
use crate::encode::pb::{PbConstraint, PbFormula, PbOp};
use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Vertex};

fn incidence(g: &BicoloredGraph) -> Result<Vec<Vec<usize>>> {
    if !g.removed().is_empty() {
        return Err(Error::InvalidGraph(
            "encoders need a graph without deleted vertices".into(),
        ));
    }
    let mut adj = vec![Vec::new(); g.n() + 1];
    for (idx, e) in g.edges().iter().enumerate() {
        adj[e.u].push(idx);
        adj[e.v].push(idx);
    }
    Ok(adj)
}

fn warn_isolated(v: Vertex) {
    log::warn!("vertex {v} has no incident edge; the matching formula is unsatisfiable");
}

fn edge_vars(g: &BicoloredGraph) -> (VarMap, Vec<Lit>) {
    let mut vars = VarMap::new();
    let lits = (0..g.edge_count()).map(|idx| vars.named(VarName::Edge(idx))).collect();
    (vars, lits)
}

/// CNF flavor; satisfiable iff `G` (colors ignored) has a perfect matching.
pub fn build_exactone_cnf(g: &BicoloredGraph) -> Result<(CnfFormula, VarMap)> {
    let adj = incidence(g)?;
    let (vars, edges) = edge_vars(g);
    let mut b = CnfBuilder::from_vars(vars, Default::default());
    for v in 1..=g.n() {
        if adj[v].is_empty() {
            warn_isolated(v);
        }
        let lits: Vec<Lit> = adj[v].iter().map(|&idx| edges[idx]).collect();
        b.exact_one(&lits, "pm");
    }
    let (mut f, vars) = b.finish();
    f.set_meta("encoding", "exactone-cnf");
    f.set_meta("graph", format!("{:016x}", g.fingerprint()));
    Ok((f, vars))
}

/// Pseudo-Boolean flavor with native `= 1` constraints.
pub fn build_exactone_pb(g: &BicoloredGraph) -> Result<(PbFormula, VarMap)> {
    let adj = incidence(g)?;
    let (mut vars, edges) = edge_vars(g);
    let mut f = PbFormula::default();
    let mut falsum = None;
    for v in 1..=g.n() {
        if adj[v].is_empty() {
            warn_isolated(v);
            if falsum.is_none() {
                let x = vars.aux("falsum");
                f.linear.push(PbConstraint::clause(&[x]));
                f.linear.push(PbConstraint::clause(&[!x]));
                falsum = Some(x);
            }
            continue;
        }
        let terms = adj[v].iter().map(|&idx| (1, edges[idx]));
        f.linear.push(PbConstraint::over_lits(terms, PbOp::Eq, 1));
    }
    f.var_count = vars.len() as u32;
    f.set_meta("encoding", "exactone-pb");
    f.set_meta("graph", format!("{:016x}", g.fingerprint()));
    Ok((f, vars))
}

/// Chosen edge indices from a model of either flavor.
pub fn decode_matching(model: &[bool], vars: &VarMap) -> Vec<usize> {
    vars.iter()
        .filter_map(|(id, name)| match name {
            VarName::Edge(idx) if model.get(id as usize) == Some(&true) => Some(*idx),
            _ => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;
    use crate::solver::internal::{brute_force_models, dpll};

    #[test]
    fn six_cycle_has_two_projected_models() {
        let (f, vars) = build_exactone_cnf(&generate::cycle(6)).unwrap();
        assert_eq!(vars.named_count(), 6);
        let mut matchings: Vec<Vec<usize>> = brute_force_models(&f)
            .unwrap()
            .iter()
            .map(|m| decode_matching(m, &vars))
            .collect();
        matchings.dedup();
        assert_eq!(matchings.len(), 2);
    }

    #[test]
    fn k24_is_unsat_in_both_flavors() {
        let g = generate::complete_bipartite(2, 4).unwrap();
        assert!(dpll(&build_exactone_cnf(&g).unwrap().0).is_none());
        let (pb, _) = build_exactone_pb(&g).unwrap();
        assert!(dpll(&pb.to_cnf().unwrap()).is_none());
    }

    #[test]
    fn isolated_vertex_is_trivially_unsat() {
        let g = BicoloredGraph::uncolored(4, [(1, 2), (2, 3)]).unwrap();
        let (f, _) = build_exactone_cnf(&g).unwrap();
        assert!(dpll(&f).is_none());
        let (pb, _) = build_exactone_pb(&g).unwrap();
        assert!(pb.to_opb().unwrap().contains("#variable= 3"));
        assert!(dpll(&pb.to_cnf().unwrap()).is_none());
    }
}
