//! In-process reference solvers: a truth-table enumerator for tiny formulas
//! and a DPLL search (watched literals, chronological backtracking, no
//! clause learning) used for model counting and assumption queries.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;
use std::time::Instant;

use crate::cnf::{CnfFormula, Lit};
use crate::error::{Error, Result};

/// Largest formula the truth-table enumerator accepts.
pub const BRUTE_FORCE_MAX_VARS: u32 = 30;

fn check_brute_guard(f: &CnfFormula) -> Result<()> {
    if f.var_count > BRUTE_FORCE_MAX_VARS {
        return Err(Error::OracleGuard(format!(
            "{} variables exceeds the truth-table cap of {BRUTE_FORCE_MAX_VARS}",
            f.var_count
        )));
    }
    Ok(())
}

/// Clause as bit masks over variables `1..=30` (bit `v - 1`).
fn masks(f: &CnfFormula) -> Vec<(u32, u32)> {
    f.clauses
        .iter()
        .map(|c| {
            c.iter().fold((0u32, 0u32), |(pos, neg), l| {
                let bit = 1u32 << (l.var() - 1);
                if l.is_positive() {
                    (pos | bit, neg)
                } else {
                    (pos, neg | bit)
                }
            })
        })
        .collect()
}

fn satisfies(masks: &[(u32, u32)], assignment: u32) -> bool {
    masks
        .iter()
        .all(|&(pos, neg)| assignment & pos != 0 || !assignment & neg != 0)
}

fn unpack(var_count: u32, assignment: u32) -> Vec<bool> {
    std::iter::once(false)
        .chain((0..var_count).map(|v| assignment >> v & 1 == 1))
        .collect()
}

/// Exhaustive search over all `2^var_count` assignments. Returns the first
/// model in counting order.
pub fn brute_force(f: &CnfFormula) -> Result<Option<Vec<bool>>> {
    check_brute_guard(f)?;
    let m = masks(f);
    let total: u64 = 1 << f.var_count;
    Ok((0..total)
        .map(|a| a as u32)
        .find(|&a| satisfies(&m, a))
        .map(|a| unpack(f.var_count, a)))
}

/// Every model, as assignments indexed by id.
pub fn brute_force_models(f: &CnfFormula) -> Result<Vec<Vec<bool>>> {
    check_brute_guard(f)?;
    let m = masks(f);
    let total: u64 = 1 << f.var_count;
    Ok((0..total)
        .map(|a| a as u32)
        .filter(|&a| satisfies(&m, a))
        .map(|a| unpack(f.var_count, a))
        .collect())
}

const UNASSIGNED: i8 = 0;

fn lit_index(l: Lit) -> usize {
    2 * l.var() as usize + usize::from(!l.is_positive())
}

/// DPLL over a fixed clause set.
pub struct Dpll {
    var_count: usize,
    clauses: Vec<Vec<Lit>>,
    watches: Vec<Vec<usize>>,
    values: Vec<i8>,
    trail: Vec<Lit>,
    head: usize,
    units: Vec<Lit>,
    empty: bool,
    /// Per-decision `(trail length before, decision literal, already flipped)`.
    decisions: Vec<(usize, Lit, bool)>,
    next_var: usize,
    nodes: u64,
    budget: Budget,
    interrupted: bool,
}

/// When a search should give up.
#[derive(Clone, Debug, Default)]
pub struct Budget {
    pub deadline: Option<Instant>,
    pub stop: Option<Arc<AtomicBool>>,
}

impl Budget {
    pub fn expired(&self) -> bool {
        self.stop.as_ref().is_some_and(|s| s.load(Ordering::Relaxed))
            || self.deadline.is_some_and(|d| Instant::now() >= d)
    }
}

/// Outcome of a search that may be cut short.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchResult {
    Sat(Vec<bool>),
    Unsat,
    Interrupted,
}

impl Dpll {
    pub fn new(f: &CnfFormula) -> Self {
        Self::with_assumptions(f, &[])
    }

    /// Solver over `f` with `assumptions` added as unit clauses.
    pub fn with_assumptions(f: &CnfFormula, assumptions: &[Lit]) -> Self {
        let var_count = f.var_count as usize;
        let mut s = Dpll {
            var_count,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * var_count + 2],
            values: vec![UNASSIGNED; var_count + 1],
            trail: Vec::with_capacity(var_count),
            head: 0,
            units: assumptions.to_vec(),
            empty: false,
            decisions: Vec::new(),
            next_var: 1,
            nodes: 0,
            budget: Budget::default(),
            interrupted: false,
        };
        for clause in &f.clauses {
            let mut c = clause.clone();
            c.sort_unstable();
            c.dedup();
            match c.len() {
                0 => s.empty = true,
                1 => s.units.push(c[0]),
                _ => {
                    let idx = s.clauses.len();
                    s.watches[lit_index(c[0])].push(idx);
                    s.watches[lit_index(c[1])].push(idx);
                    s.clauses.push(c);
                }
            }
        }
        s
    }

    /// Gives up once `deadline` passes.
    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.budget.deadline = deadline;
        self
    }

    /// Gives up once `stop` is raised.
    pub fn with_stop(mut self, stop: Arc<AtomicBool>) -> Self {
        self.budget.stop = Some(stop);
        self
    }

    fn value(&self, l: Lit) -> i8 {
        let v = self.values[l.var() as usize];
        if l.is_positive() {
            v
        } else {
            -v
        }
    }

    fn assign(&mut self, l: Lit) {
        self.values[l.var() as usize] = if l.is_positive() { 1 } else { -1 };
        self.trail.push(l);
    }

    /// Unit propagation; `false` on conflict.
    fn propagate(&mut self) -> bool {
        while self.head < self.trail.len() {
            let falsified = !self.trail[self.head];
            self.head += 1;
            let slot = lit_index(falsified);
            let mut watchers = std::mem::take(&mut self.watches[slot]);
            let mut i = 0;
            let mut ok = true;
            while i < watchers.len() {
                let ci = watchers[i];
                let clause = &mut self.clauses[ci];
                if clause[0] == falsified {
                    clause.swap(0, 1);
                }
                let other = clause[0];
                let other_val = {
                    let v = self.values[other.var() as usize];
                    if other.is_positive() {
                        v
                    } else {
                        -v
                    }
                };
                if other_val == 1 {
                    i += 1;
                    continue;
                }
                let mut moved = false;
                for k in 2..clause.len() {
                    let cand = clause[k];
                    let v = self.values[cand.var() as usize];
                    let cv = if cand.is_positive() { v } else { -v };
                    if cv != -1 {
                        clause.swap(1, k);
                        let new_watch = clause[1];
                        self.watches[lit_index(new_watch)].push(ci);
                        watchers.swap_remove(i);
                        moved = true;
                        break;
                    }
                }
                if moved {
                    continue;
                }
                i += 1;
                if other_val == -1 {
                    ok = false;
                    break;
                }
                self.assign(other);
            }
            self.watches[slot].extend(watchers);
            if !ok {
                return false;
            }
        }
        true
    }

    fn undo_to(&mut self, len: usize) {
        for l in self.trail.drain(len..) {
            self.values[l.var() as usize] = UNASSIGNED;
        }
        self.head = self.head.min(len);
        self.next_var = 1;
    }

    fn start(&mut self) -> bool {
        if self.empty {
            return false;
        }
        for l in std::mem::take(&mut self.units) {
            match self.value(l) {
                1 => {}
                -1 => return false,
                _ => self.assign(l),
            }
        }
        self.propagate()
    }

    /// Flips the most recent unflipped decision; `false` when exhausted.
    fn backtrack(&mut self) -> bool {
        while let Some((len, lit, flipped)) = self.decisions.pop() {
            self.undo_to(len);
            if !flipped {
                self.decisions.push((len, !lit, true));
                self.assign(!lit);
                return true;
            }
        }
        false
    }

    fn pick(&mut self) -> Option<Lit> {
        while self.next_var <= self.var_count {
            let v = self.next_var;
            if self.values[v] == UNASSIGNED {
                return Some(!Lit::pos(v as u32));
            }
            self.next_var += 1;
        }
        None
    }

    /// Runs the search, calling `on_model` at every complete assignment;
    /// stops when it returns `false`.
    fn search(&mut self, mut on_model: impl FnMut(&[i8]) -> bool) {
        if !self.start() {
            return;
        }
        loop {
            if !self.propagate() {
                if !self.backtrack() {
                    return;
                }
                continue;
            }
            self.nodes += 1;
            if self.nodes.is_multiple_of(4096) && self.budget.expired() {
                self.interrupted = true;
                return;
            }
            match self.pick() {
                Some(l) => {
                    self.decisions.push((self.trail.len(), l, false));
                    self.assign(l);
                }
                None => {
                    if !on_model(&self.values) || !self.backtrack() {
                        return;
                    }
                }
            }
        }
    }

    /// First model found, indexed by id.
    pub fn solve(self) -> Option<Vec<bool>> {
        match self.run() {
            SearchResult::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn run(mut self) -> SearchResult {
        let mut model = None;
        self.search(|values| {
            model = Some(values.iter().map(|&v| v == 1).collect());
            false
        });
        match model {
            Some(m) => SearchResult::Sat(m),
            None if self.interrupted => SearchResult::Interrupted,
            None => SearchResult::Unsat,
        }
    }

    /// Number of total models, stopping early at `limit`.
    pub fn count_models(mut self, limit: u64) -> u64 {
        let mut count = 0;
        self.search(|_| {
            count += 1;
            count < limit
        });
        count
    }

    /// Decisions made so far (search effort).
    pub fn nodes(&self) -> u64 {
        self.nodes
    }
}

/// DPLL satisfiability check returning a model.
pub fn dpll(f: &CnfFormula) -> Option<Vec<bool>> {
    Dpll::new(f).solve()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cnf(vars: u32, clauses: &[&[i32]]) -> CnfFormula {
        CnfFormula {
            var_count: vars,
            clauses: clauses
                .iter()
                .map(|c| c.iter().map(|&l| Lit::from_dimacs(l)).collect())
                .collect(),
            meta: vec![],
        }
    }

    #[test]
    fn unit_and_contradiction() {
        let f = cnf(1, &[&[1]]);
        assert_eq!(brute_force(&f).unwrap(), Some(vec![false, true]));
        assert_eq!(dpll(&f), Some(vec![false, true]));
        let g = cnf(1, &[&[1], &[-1]]);
        assert_eq!(brute_force(&g).unwrap(), None);
        assert_eq!(dpll(&g), None);
    }

    #[test]
    fn guard() {
        assert!(brute_force(&cnf(31, &[])).is_err());
    }

    #[test]
    fn exact_one_over_three_has_three_models() {
        let f = cnf(3, &[&[1, 2, 3], &[-1, -2], &[-1, -3], &[-2, -3]]);
        assert_eq!(brute_force_models(&f).unwrap().len(), 3);
        assert_eq!(Dpll::new(&f).count_models(u64::MAX), 3);
    }

    #[test]
    fn pigeonhole_three_into_two_is_unsat() {
        // p(i,j): pigeon i in hole j, var = 2*(i-1) + j.
        let mut cl: Vec<Vec<i32>> = (1..=3).map(|i| vec![2 * (i - 1) + 1, 2 * (i - 1) + 2]).collect();
        for j in 1..=2 {
            for a in 1..=3 {
                for b in a + 1..=3 {
                    cl.push(vec![-(2 * (a - 1) + j), -(2 * (b - 1) + j)]);
                }
            }
        }
        let refs: Vec<&[i32]> = cl.iter().map(|c| c.as_slice()).collect();
        let f = cnf(6, &refs);
        assert_eq!(dpll(&f), None);
        assert_eq!(brute_force(&f).unwrap(), None);
    }

    #[test]
    fn models_satisfy() {
        let f = cnf(4, &[&[1, -2], &[2, 3], &[-3, -4], &[4, -1]]);
        let m = dpll(&f).unwrap();
        assert!(f.eval(&m));
        assert_eq!(
            Dpll::new(&f).count_models(u64::MAX),
            brute_force_models(&f).unwrap().len() as u64
        );
    }

    #[test]
    fn past_deadline_interrupts() {
        let mut cl: Vec<Vec<i32>> = (1..=9).map(|i| (1..=8).map(|j| 8 * (i - 1) + j).collect()).collect();
        for j in 1..=8 {
            for a in 1..=9 {
                for b in a + 1..=9 {
                    cl.push(vec![-(8 * (a - 1) + j), -(8 * (b - 1) + j)]);
                }
            }
        }
        let refs: Vec<&[i32]> = cl.iter().map(|c| c.as_slice()).collect();
        let f = cnf(72, &refs);
        let r = Dpll::new(&f).with_deadline(Some(Instant::now())).run();
        assert_eq!(r, SearchResult::Interrupted);
    }

    #[test]
    fn assumptions_restrict() {
        let f = cnf(2, &[&[1, 2]]);
        let s = Dpll::with_assumptions(&f, &[Lit::from_dimacs(-1)]);
        assert_eq!(s.count_models(10), 1);
    }
}
