//! The Tutte-set encoding: a model is a legal coloring `c` together with a
//! vertex set `S` such that `G_c[V \ S]` has more odd components than `|S|`.
//! The formula is satisfiable iff some legal coloring has no perfect matching.

use serde::{Deserialize, Serialize};

use crate::cnf::{CnfBuilder, CnfFormula, GadgetConfig, Lit, VarMap, VarName};
use crate::coloring::{LegalColoringSpec, VertexColoring};
use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TutteOptions {
    /// Keep only `cc(v, i)` with `i <= v` and forbid components indexed by a
    /// vertex that is not the smallest member of its component.
    pub opt: bool,
    /// Ordered symmetric vertex set; forces `T` to be a prefix of it.
    pub gs: Option<Vec<Vertex>>,
    pub legal: LegalColoringSpec,
}

impl TutteOptions {
    pub fn new(legal: LegalColoringSpec) -> Self {
        TutteOptions {
            opt: false,
            gs: None,
            legal,
        }
    }

    pub fn with_opt(mut self, opt: bool) -> Self {
        self.opt = opt;
        self
    }

    pub fn with_gs(mut self, gs: Option<Vec<Vertex>>) -> Self {
        self.gs = gs;
        self
    }
}

/// A propositional constraint before compilation to a concrete format.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Constraint {
    Clause(Vec<Lit>),
    ExactOne(Vec<Lit>),
    ExactK(Vec<Lit>, usize),
    Equiv(Lit, Lit),
    /// `out <-> and(ins)`.
    And(Lit, Vec<Lit>),
    /// `out <-> xor(ins)`.
    Xor(Lit, Vec<Lit>),
    /// `#true(xs) > #true(ys)`.
    Greater(Vec<Lit>, Vec<Lit>),
}

/// The encoding as tagged constraints over an allocated variable map.
pub(crate) struct TutteIr {
    pub vars: VarMap,
    pub constraints: Vec<(&'static str, Constraint)>,
}

/// Checks a symmetric-set list: at least two distinct in-range vertices,
/// every permutation an automorphism of `g`, and `spec` invariant.
pub fn check_symmetric_set(g: &BicoloredGraph, spec: &LegalColoringSpec, u: &[Vertex]) -> Result<()> {
    if u.len() < 2 {
        return Err(Error::InvalidParams("symmetric set needs at least two vertices".into()));
    }
    if let Some(&v) = u.iter().find(|&&v| v == 0 || v > g.n()) {
        return Err(Error::InvalidParams(format!(
            "symmetric set vertex {v} outside 1..={}",
            g.n()
        )));
    }
    let mut sorted = u.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(Error::InvalidParams("symmetric set repeats a vertex".into()));
    }
    if !g.is_symmetric_set(u) {
        return Err(Error::InvalidParams(format!(
            "{u:?} is not a symmetric vertex set of the graph"
        )));
    }
    if !spec.is_invariant_under(u) {
        return Err(Error::InvalidParams(format!(
            "coloring list is not invariant under permuting {u:?}"
        )));
    }
    Ok(())
}

fn check_inputs(g: &BicoloredGraph, opts: &TutteOptions) -> Result<()> {
    if !g.removed().is_empty() {
        return Err(Error::InvalidGraph(
            "encoders need a graph without deleted vertices".into(),
        ));
    }
    opts.legal.check_graph(g)?;
    if let Some(u) = &opts.gs {
        check_symmetric_set(g, &opts.legal, u)?;
    }
    Ok(())
}

/// `cc(v, i)`, or `None` where the optimization fixes it to false.
pub(crate) fn cc(vars: &VarMap, v: Vertex, i: usize) -> Option<Lit> {
    vars.get(&VarName::Cc(v, i))
}

fn lit(vars: &VarMap, name: VarName) -> Lit {
    vars.get(&name).expect("allocated")
}

/// Allocates the named variables in the order vc, T, e, cc, Odd.
fn allocate(g: &BicoloredGraph, opt: bool) -> VarMap {
    let (n, d) = (g.n(), g.d());
    let mut vars = VarMap::new();
    for v in 1..=n {
        for i in 1..=d {
            vars.named(VarName::Vc(v, i));
        }
    }
    for v in 1..=n {
        vars.named(VarName::T(v));
    }
    for idx in 0..g.edge_count() {
        vars.named(VarName::E(idx));
    }
    for v in 1..=n {
        let top = if opt { v } else { n };
        for i in 1..=top {
            vars.named(VarName::Cc(v, i));
        }
    }
    for i in 1..=n {
        vars.named(VarName::Odd(i));
    }
    vars
}

/// Legal-coloring constraints over `vc`. Explicit lists get one selector
/// auxiliary per distinct coloring.
pub(crate) fn legal_constraints(vars: &mut VarMap, spec: &LegalColoringSpec, n: usize, d: usize) -> Vec<Constraint> {
    let vc = |vars: &VarMap, v, i| lit(vars, VarName::Vc(v, i));
    let mut out = Vec::new();
    match spec {
        LegalColoringSpec::Ghz { .. } => {
            for v in 1..n {
                for i in 1..=d {
                    out.push(Constraint::Equiv(vc(vars, v, i), vc(vars, v + 1, i)));
                }
            }
        }
        LegalColoringSpec::W { .. } | LegalColoringSpec::Dicke { .. } => {
            let k = if let LegalColoringSpec::Dicke { k, .. } = spec {
                *k
            } else {
                1
            };
            let reds = (1..=n).map(|v| vc(vars, v, 1)).collect();
            out.push(Constraint::ExactK(reds, k));
        }
        LegalColoringSpec::Explicit { colorings, .. } => {
            let mut distinct: Vec<&VertexColoring> = Vec::new();
            for c in colorings {
                if !distinct.contains(&c) {
                    distinct.push(c);
                }
            }
            let selectors: Vec<Lit> = distinct.iter().map(|_| vars.aux("sel")).collect();
            for (&s, c) in selectors.iter().zip(&distinct) {
                for v in 1..=n {
                    out.push(Constraint::Clause(vec![!s, vc(vars, v, c.color(v))]));
                }
            }
            out.push(Constraint::ExactOne(selectors));
        }
    }
    out
}

pub(crate) fn tutte_ir(g: &BicoloredGraph, opts: &TutteOptions) -> Result<TutteIr> {
    check_inputs(g, opts)?;
    let (n, d) = (g.n(), g.d());
    let mut vars = allocate(g, opts.opt);
    let mut cs: Vec<(&'static str, Constraint)> = Vec::new();
    let vc = |vars: &VarMap, v, i| lit(vars, VarName::Vc(v, i));
    let t = |vars: &VarMap, v| lit(vars, VarName::T(v));

    for v in 1..=n {
        let colors = (1..=d).map(|i| vc(&vars, v, i)).collect();
        cs.push(("vcol", Constraint::ExactOne(colors)));
    }
    for c in legal_constraints(&mut vars, &opts.legal, n, d) {
        cs.push(("legal", c));
    }
    for (idx, e) in g.edges().iter().enumerate() {
        let ins = vec![
            !t(&vars, e.u),
            !t(&vars, e.v),
            vc(&vars, e.u, e.cu),
            vc(&vars, e.v, e.cv),
        ];
        cs.push(("edge", Constraint::And(lit(&vars, VarName::E(idx)), ins)));
    }
    for (idx, e) in g.edges().iter().enumerate() {
        let on = lit(&vars, VarName::E(idx));
        for i in 1..=n {
            match (cc(&vars, e.u, i), cc(&vars, e.v, i)) {
                (Some(a), Some(b)) => {
                    cs.push(("comp", Constraint::Clause(vec![!on, !a, b])));
                    cs.push(("comp", Constraint::Clause(vec![!on, a, !b])));
                }
                (Some(x), None) | (None, Some(x)) => cs.push(("comp", Constraint::Clause(vec![!on, !x]))),
                (None, None) => {}
            }
        }
    }
    for v in 1..=n {
        let mut slots: Vec<Lit> = (1..=n).filter_map(|i| cc(&vars, v, i)).collect();
        slots.push(t(&vars, v));
        cs.push(("valid", Constraint::ExactOne(slots)));
    }
    for i in 1..=n {
        let members = (1..=n).filter_map(|v| cc(&vars, v, i)).collect();
        cs.push(("odd", Constraint::Xor(lit(&vars, VarName::Odd(i)), members)));
    }
    let odds = (1..=n).map(|i| lit(&vars, VarName::Odd(i))).collect();
    let ts = (1..=n).map(|v| t(&vars, v)).collect();
    cs.push(("tutte", Constraint::Greater(odds, ts)));

    if opts.opt {
        for v in 1..=n {
            for u in v + 1..=n {
                let Some(claim) = cc(&vars, u, v) else { continue };
                cs.push(("opt", Constraint::Clause(vec![!t(&vars, v), !claim])));
                for i in 1..v {
                    let below = cc(&vars, v, i).expect("i < v is kept");
                    cs.push(("opt", Constraint::Clause(vec![!below, !claim])));
                }
            }
        }
    }
    if let Some(u) = &opts.gs {
        for w in u.windows(2) {
            cs.push(("gs", Constraint::Clause(vec![!t(&vars, w[1]), t(&vars, w[0])])));
        }
    }
    Ok(TutteIr { vars, constraints: cs })
}

/// Compiles constraints through the CNF gadgets.
pub(crate) fn compile_cnf(
    vars: VarMap,
    constraints: &[(&'static str, Constraint)],
    config: GadgetConfig,
) -> (CnfFormula, VarMap) {
    let mut b = CnfBuilder::from_vars(vars, config);
    for (tag, c) in constraints {
        match c {
            Constraint::Clause(lits) => b.add_clause(lits.iter().copied()),
            Constraint::ExactOne(lits) => b.exact_one(lits, tag),
            Constraint::ExactK(lits, k) => b.exact_k(lits, *k, tag),
            Constraint::Equiv(a, c) => b.equiv(*a, *c),
            Constraint::And(out, ins) => b.and_gate(*out, ins),
            Constraint::Xor(out, ins) => b.xor_to_cnf(*out, ins, tag),
            Constraint::Greater(xs, ys) => b.count_greater(xs, ys, tag),
        }
    }
    b.finish()
}

fn describe(g: &BicoloredGraph, opts: &TutteOptions, f: &mut CnfFormula) {
    f.set_meta("encoding", "tutte-cnf");
    f.set_meta("graph", format!("{:016x}", g.fingerprint()));
    f.set_meta("legal", &opts.legal);
    f.set_meta("opt", opts.opt);
    if let Some(u) = &opts.gs {
        f.set_meta("gs", format!("{u:?}"));
    }
}

/// Builds the Tutte CNF. Satisfiable iff `G` violates FORALL-PMVC for
/// `opts.legal`.
pub fn build_tutte(g: &BicoloredGraph, opts: &TutteOptions) -> Result<(CnfFormula, VarMap)> {
    build_tutte_with(g, opts, GadgetConfig::default())
}

pub fn build_tutte_with(g: &BicoloredGraph, opts: &TutteOptions, config: GadgetConfig) -> Result<(CnfFormula, VarMap)> {
    let ir = tutte_ir(g, opts)?;
    let (mut f, vars) = compile_cnf(ir.vars, &ir.constraints, config);
    describe(g, opts, &mut f);
    log::debug!(
        "tutte encoding: {} named vars, {} total, {} clauses",
        vars.named_count(),
        f.var_count,
        f.clauses.len()
    );
    Ok((f, vars))
}

/// Tutte CNF of an uncolored graph (`d = 1`): satisfiable iff `G` has no
/// perfect matching.
pub fn build_tutte_uncolored(g: &BicoloredGraph) -> Result<(CnfFormula, VarMap)> {
    if g.d() != 1 {
        return Err(Error::InvalidGraph(format!(
            "uncolored encoding needs d = 1, got {}",
            g.d()
        )));
    }
    build_tutte(g, &TutteOptions::new(LegalColoringSpec::ghz(g.n(), 1)?))
}

/// A decoded refutation: a coloring and a Tutte set of its induced graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub coloring: VertexColoring,
    pub tutte_set: Vec<Vertex>,
    /// Component index per vertex (entry `v - 1`), `None` for Tutte-set
    /// vertices. Diagnostic only.
    pub components: Vec<Option<usize>>,
}

impl Witness {
    /// `#odd(G_c[V \ S])`.
    pub fn odd_components(&self, g: &BicoloredGraph) -> usize {
        g.induced(&self.coloring)
            .without_vertices(&self.tutte_set)
            .count_odd_components()
    }
}

fn vertex_count(vars: &VarMap) -> usize {
    vars.iter()
        .filter_map(|(_, name)| match name {
            VarName::Vc(v, _) | VarName::T(v) => Some(*v),
            _ => None,
        })
        .max()
        .unwrap_or(0)
}

/// Reads a witness back from a model (indexed by id, slot 0 unused).
pub fn decode_witness(model: &[bool], vars: &VarMap) -> Result<Witness> {
    if model.len() <= vars.len() {
        return Err(Error::MalformedModel(format!(
            "model covers {} variables, map has {}",
            model.len().saturating_sub(1),
            vars.len()
        )));
    }
    let n = vertex_count(vars);
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut tutte_set = Vec::new();
    let mut components = vec![None; n];
    for (id, name) in vars.iter() {
        if !model[id as usize] {
            continue;
        }
        match *name {
            VarName::Vc(v, i) => {
                if colors[v - 1].replace(i).is_some() {
                    return Err(Error::MalformedModel(format!("vertex {v} has two colors")));
                }
            }
            VarName::T(v) => tutte_set.push(v),
            VarName::Cc(v, i) => components[v - 1] = Some(i),
            _ => {}
        }
    }
    let colors = colors
        .into_iter()
        .enumerate()
        .map(|(i, c)| c.ok_or_else(|| Error::MalformedModel(format!("vertex {} has no color", i + 1))))
        .collect::<Result<Vec<_>>>()?;
    Ok(Witness {
        coloring: VertexColoring::new(colors),
        tutte_set,
        components,
    })
}

/// Re-checks a witness with graph operations only: the coloring is legal and
/// `#odd(G_c[V \ S]) > |S|`.
pub fn verify_witness(g: &BicoloredGraph, spec: &LegalColoringSpec, w: &Witness) -> bool {
    if w.coloring.n() != g.n() || !spec.contains(&w.coloring) {
        return false;
    }
    if w.tutte_set.iter().any(|&v| v == 0 || v > g.n()) {
        return false;
    }
    let mut s = w.tutte_set.clone();
    s.sort_unstable();
    s.dedup();
    if s.len() != w.tutte_set.len() {
        return false;
    }
    w.odd_components(g) > s.len()
}
