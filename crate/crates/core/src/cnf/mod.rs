//! Clause database, structured variable names, and the gadget library all
//! encoders compile through.

mod dimacs;
mod gadgets;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::Not;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use dimacs::{parse_dimacs, DimacsHeader};
pub use gadgets::GadgetConfig;

use crate::error::{Error, Result};
use crate::graph::{Color, Vertex};

/// A DIMACS literal: `+id` or `-id`, never zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn pos(var: u32) -> Self {
        assert!(var >= 1 && var <= i32::MAX as u32, "variable ids are 1-based");
        Lit(var as i32)
    }

    pub fn from_dimacs(raw: i32) -> Self {
        assert!(raw != 0, "0 is not a literal");
        Lit(raw)
    }

    pub fn var(self) -> u32 {
        self.0.unsigned_abs()
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    /// Truth value under `assignment` (indexed by id, slot 0 unused).
    pub fn eval(self, assignment: &[bool]) -> bool {
        assignment[self.var() as usize] == self.is_positive()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The structured name behind a variable id.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarName {
    /// Vertex `v` has color `i`.
    Vc(Vertex, Color),
    /// Vertex `v` is in the Tutte set.
    T(Vertex),
    /// Edge `idx` survives in the color-filtered, Tutte-set-deleted graph.
    E(usize),
    /// Vertex `v` lies in component `i`.
    Cc(Vertex, usize),
    /// Component `i` has odd size.
    Odd(usize),
    /// Edge `idx` is in the perfect matching.
    Edge(usize),
    /// Auxiliary introduced by a gadget; `tag` names the constraint family.
    Aux(String, u32),
}

impl VarName {
    pub fn is_aux(&self) -> bool {
        matches!(self, VarName::Aux(..))
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            VarName::Vc(v, i) => write!(f, "vc({v},{i})"),
            VarName::T(v) => write!(f, "T({v})"),
            VarName::E(idx) => write!(f, "e({idx})"),
            VarName::Cc(v, i) => write!(f, "cc({v},{i})"),
            VarName::Odd(i) => write!(f, "Odd({i})"),
            VarName::Edge(idx) => write!(f, "edge({idx})"),
            VarName::Aux(tag, n) => write!(f, "aux({tag},{n})"),
        }
    }
}

impl FromStr for VarName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::parse(0, format!("bad variable name {s:?}"));
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').collect();
        let num = |x: &str| x.trim().parse::<usize>().map_err(|_| bad());
        Ok(match (head, args.as_slice()) {
            ("vc", [v, i]) => VarName::Vc(num(v)?, num(i)?),
            ("T", [v]) => VarName::T(num(v)?),
            ("e", [x]) => VarName::E(num(x)?),
            ("cc", [v, i]) => VarName::Cc(num(v)?, num(i)?),
            ("Odd", [i]) => VarName::Odd(num(i)?),
            ("edge", [x]) => VarName::Edge(num(x)?),
            ("aux", [tag, n]) => VarName::Aux(tag.to_string(), num(n)? as u32),
            _ => return Err(bad()),
        })
    }
}

/// Bidirectional name/id map. Ids are dense from 1; every named variable
/// precedes every auxiliary.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VarMap {
    names: Vec<VarName>,
    ids: HashMap<VarName, u32>,
    named: usize,
    aux_counters: HashMap<String, u32>,
}

impl VarMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Allocates a named variable. Panics once auxiliaries exist or if the
    /// name is taken.
    pub fn named(&mut self, name: VarName) -> Lit {
        assert!(!name.is_aux(), "use aux() for auxiliaries");
        assert_eq!(self.named, self.names.len(), "named variables must precede auxiliaries");
        self.named += 1;
        self.insert(name)
    }

    pub fn aux(&mut self, tag: &str) -> Lit {
        let counter = self.aux_counters.entry(tag.to_string()).or_insert(0);
        *counter += 1;
        let name = VarName::Aux(tag.to_string(), *counter);
        self.insert(name)
    }

    fn insert(&mut self, name: VarName) -> Lit {
        assert!(!self.ids.contains_key(&name), "duplicate variable {name}");
        self.names.push(name.clone());
        let id = self.names.len() as u32;
        self.ids.insert(name, id);
        Lit::pos(id)
    }

    pub fn get(&self, name: &VarName) -> Option<Lit> {
        self.ids.get(name).map(|&id| Lit::pos(id))
    }

    pub fn name(&self, id: u32) -> Option<&VarName> {
        self.names.get((id as usize).checked_sub(1)?)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    /// Variables allocated before the first auxiliary.
    pub fn named_count(&self) -> usize {
        self.named
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, &VarName)> {
        self.names.iter().enumerate().map(|(i, n)| (i as u32 + 1, n))
    }

    pub fn to_json(&self) -> String {
        let sidecar = VarMapSidecar {
            named_count: self.named,
            vars: self.iter().map(|(id, n)| (n.to_string(), id)).collect(),
        };
        serde_json::to_string_pretty(&sidecar).expect("var map serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let sidecar: VarMapSidecar = serde_json::from_str(text)?;
        let mut by_id: Vec<(u32, VarName)> = sidecar
            .vars
            .iter()
            .map(|(n, &id)| Ok((id, n.parse()?)))
            .collect::<Result<_>>()?;
        by_id.sort_by_key(|(id, _)| *id);
        let mut map = VarMap::new();
        for (expected, (id, name)) in (1..).zip(by_id) {
            if id != expected {
                return Err(Error::parse(0, format!("var map ids are not dense at {id}")));
            }
            if let VarName::Aux(tag, n) = &name {
                let c = map.aux_counters.entry(tag.clone()).or_insert(0);
                *c = (*c).max(*n);
            }
            map.names.push(name.clone());
            map.ids.insert(name, id);
        }
        map.named = sidecar.named_count;
        Ok(map)
    }
}

#[derive(Serialize, Deserialize)]
struct VarMapSidecar {
    named_count: usize,
    vars: BTreeMap<String, u32>,
}

/// A finished CNF formula.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CnfFormula {
    pub var_count: u32,
    pub clauses: Vec<Vec<Lit>>,
    /// `(key, value)` pairs emitted as DIMACS comment lines.
    pub meta: Vec<(String, String)>,
}

impl CnfFormula {
    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.clauses.iter().all(|c| c.iter().any(|l| l.eval(assignment)))
    }

    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        let value = value.to_string();
        match self.meta.iter_mut().find(|(k, _)| k == key) {
            Some(slot) => slot.1 = value,
            None => self.meta.push((key.to_string(), value)),
        }
    }

    /// DIMACS text: metadata comments, `p cnf` header, zero-terminated clauses.
    pub fn to_dimacs(&self) -> String {
        dimacs::write(self)
    }
}

/// Accumulates clauses while allocating variables.
#[derive(Debug, Default)]
pub struct CnfBuilder {
    pub vars: VarMap,
    clauses: Vec<Vec<Lit>>,
    config: GadgetConfig,
    falsum: Option<Lit>,
}

impl CnfBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_config(config: GadgetConfig) -> Self {
        CnfBuilder {
            config,
            ..Default::default()
        }
    }

    /// Continues allocating after the variables already in `vars`.
    pub fn from_vars(vars: VarMap, config: GadgetConfig) -> Self {
        CnfBuilder {
            vars,
            config,
            ..Default::default()
        }
    }

    pub fn config(&self) -> &GadgetConfig {
        &self.config
    }

    pub fn named(&mut self, name: VarName) -> Lit {
        self.vars.named(name)
    }

    pub fn aux(&mut self, tag: &str) -> Lit {
        self.vars.aux(tag)
    }

    /// Adds a clause, dropping repeated literals and tautologies. An empty
    /// clause becomes a contradiction over a dedicated auxiliary so that
    /// every emitted clause stays non-empty.
    pub fn add_clause(&mut self, lits: impl IntoIterator<Item = Lit>) {
        let mut clause: Vec<Lit> = lits.into_iter().collect();
        clause.sort_unstable_by_key(|l| (l.var(), !l.is_positive()));
        clause.dedup();
        if clause.windows(2).any(|w| w[0].var() == w[1].var()) {
            return;
        }
        for l in &clause {
            assert!(
                (l.var() as usize) <= self.vars.len(),
                "clause mentions unallocated variable {}",
                l.var()
            );
        }
        if clause.is_empty() {
            self.contradiction();
            return;
        }
        self.clauses.push(clause);
    }

    /// Makes the formula unsatisfiable.
    pub fn contradiction(&mut self) {
        if self.falsum.is_none() {
            let f = self.aux("falsum");
            self.falsum = Some(f);
            self.clauses.push(vec![f]);
            self.clauses.push(vec![!f]);
        }
    }

    pub fn clause_count(&self) -> usize {
        self.clauses.len()
    }

    pub fn finish(self) -> (CnfFormula, VarMap) {
        let formula = CnfFormula {
            var_count: self.vars.len() as u32,
            clauses: self.clauses,
            meta: Vec::new(),
        };
        (formula, self.vars)
    }
}
