//! Conflict-driven clause learning: two watched literals, first-UIP
//! learning with local minimization, VSIDS with phase saving, Luby
//! restarts. Learnt clauses are pruned by LBD at restarts, where the
//! watch lists are rebuilt from scratch.

use std::sync::atomic::AtomicBool;
use std::sync::Arc;
use std::time::Instant;

use crate::cnf::{CnfFormula, Lit};

use super::internal::{Budget, SearchResult};

const NO_REASON: u32 = u32::MAX;
const UNDEF: i8 = 0;

fn idx(l: Lit) -> usize {
    2 * l.var() as usize + usize::from(!l.is_positive())
}

#[derive(Clone, Copy)]
struct Watch {
    clause: u32,
    blocker: Lit,
}

struct Clause {
    lits: Vec<Lit>,
    learnt: bool,
    lbd: u32,
}

/// Max-heap of variables by activity.
struct Order {
    heap: Vec<u32>,
    pos: Vec<usize>,
}

const ABSENT: usize = usize::MAX;

impl Order {
    fn new(n: usize) -> Self {
        Order {
            heap: (1..=n as u32).collect(),
            pos: std::iter::once(ABSENT).chain(0..n).collect(),
        }
    }

    fn contains(&self, v: u32) -> bool {
        self.pos[v as usize] != ABSENT
    }

    fn up(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        while i > 0 {
            let parent = (i - 1) / 2;
            if act[self.heap[parent] as usize] >= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[parent];
            self.pos[self.heap[i] as usize] = i;
            i = parent;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn down(&mut self, mut i: usize, act: &[f64]) {
        let v = self.heap[i];
        loop {
            let l = 2 * i + 1;
            if l >= self.heap.len() {
                break;
            }
            let r = l + 1;
            let c = if r < self.heap.len() && act[self.heap[r] as usize] > act[self.heap[l] as usize] {
                r
            } else {
                l
            };
            if act[self.heap[c] as usize] <= act[v as usize] {
                break;
            }
            self.heap[i] = self.heap[c];
            self.pos[self.heap[i] as usize] = i;
            i = c;
        }
        self.heap[i] = v;
        self.pos[v as usize] = i;
    }

    fn insert(&mut self, v: u32, act: &[f64]) {
        if !self.contains(v) {
            self.heap.push(v);
            let i = self.heap.len() - 1;
            self.pos[v as usize] = i;
            self.up(i, act);
        }
    }

    fn pop(&mut self, act: &[f64]) -> Option<u32> {
        let top = *self.heap.first()?;
        let last = self.heap.pop().expect("non-empty");
        self.pos[top as usize] = ABSENT;
        if !self.heap.is_empty() {
            self.heap[0] = last;
            self.pos[last as usize] = 0;
            self.down(0, act);
        }
        Some(top)
    }
}

pub struct Cdcl {
    n: usize,
    clauses: Vec<Clause>,
    watches: Vec<Vec<Watch>>,
    values: Vec<i8>,
    level: Vec<u32>,
    reason: Vec<u32>,
    trail: Vec<Lit>,
    trail_lim: Vec<usize>,
    qhead: usize,
    activity: Vec<f64>,
    var_inc: f64,
    order: Order,
    phase: Vec<bool>,
    seen: Vec<bool>,
    unsat: bool,
    budget: Budget,
    conflicts: u64,
    max_learnts: usize,
    originals: usize,
}

impl Cdcl {
    pub fn new(f: &CnfFormula) -> Self {
        Self::with_assumptions(f, &[])
    }

    /// Solver over `f` with `assumptions` added as unit clauses.
    pub fn with_assumptions(f: &CnfFormula, assumptions: &[Lit]) -> Self {
        let n = f.var_count as usize;
        let mut s = Cdcl {
            n,
            clauses: Vec::new(),
            watches: vec![Vec::new(); 2 * n + 2],
            values: vec![UNDEF; n + 1],
            level: vec![0; n + 1],
            reason: vec![NO_REASON; n + 1],
            trail: Vec::with_capacity(n),
            trail_lim: Vec::new(),
            qhead: 0,
            // Ties start in id order, which follows the encoders' layout.
            activity: (0..=n).map(|v| (n - v.min(n)) as f64 / (n as f64 + 1.0)).collect(),
            var_inc: 1.0,
            order: Order::new(n),
            phase: vec![false; n + 1],
            seen: vec![false; n + 1],
            unsat: false,
            budget: Budget::default(),
            conflicts: 0,
            max_learnts: f.clauses.len() / 3 + 2000,
            originals: 0,
        };
        for &a in assumptions {
            s.add_input(vec![a]);
        }
        for c in &f.clauses {
            s.add_input(c.clone());
        }
        s.originals = s.clauses.len();
        s
    }

    pub fn with_deadline(mut self, deadline: Option<Instant>) -> Self {
        self.budget.deadline = deadline;
        self
    }

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

    fn add_input(&mut self, mut c: Vec<Lit>) {
        if self.unsat {
            return;
        }
        c.sort_unstable();
        c.dedup();
        if c.windows(2).any(|w| w[0] == !w[1]) {
            return;
        }
        c.retain(|&l| self.value(l) != -1);
        if c.iter().any(|&l| self.value(l) == 1) {
            return;
        }
        match c.len() {
            0 => self.unsat = true,
            1 => {
                self.assign(c[0], NO_REASON);
                if self.propagate().is_some() {
                    self.unsat = true;
                }
            }
            _ => {
                self.attach(c, false, 0);
            }
        }
    }

    fn attach(&mut self, lits: Vec<Lit>, learnt: bool, lbd: u32) -> u32 {
        let ci = self.clauses.len() as u32;
        self.watches[idx(!lits[0])].push(Watch {
            clause: ci,
            blocker: lits[1],
        });
        self.watches[idx(!lits[1])].push(Watch {
            clause: ci,
            blocker: lits[0],
        });
        self.clauses.push(Clause { lits, learnt, lbd });
        ci
    }

    fn assign(&mut self, l: Lit, reason: u32) {
        let v = l.var() as usize;
        self.values[v] = if l.is_positive() { 1 } else { -1 };
        self.level[v] = self.trail_lim.len() as u32;
        self.reason[v] = reason;
        self.trail.push(l);
    }

    /// Watches for literal `l` live at `idx(!l)`: they fire when `l` is
    /// falsified. Returns a conflicting clause.
    fn propagate(&mut self) -> Option<u32> {
        while self.qhead < self.trail.len() {
            let p = self.trail[self.qhead];
            self.qhead += 1;
            let false_lit = !p;
            let mut ws = std::mem::take(&mut self.watches[idx(p)]);
            let mut i = 0;
            let mut j = 0;
            let mut conflict = None;
            while i < ws.len() {
                let w = ws[i];
                i += 1;
                if self.value(w.blocker) == 1 {
                    ws[j] = w;
                    j += 1;
                    continue;
                }
                let ci = w.clause as usize;
                let lits = &mut self.clauses[ci].lits;
                if lits[0] == false_lit {
                    lits.swap(0, 1);
                }
                let first = lits[0];
                let fv = {
                    let v = self.values[first.var() as usize];
                    if first.is_positive() {
                        v
                    } else {
                        -v
                    }
                };
                if fv == 1 {
                    ws[j] = Watch {
                        clause: w.clause,
                        blocker: first,
                    };
                    j += 1;
                    continue;
                }
                let mut found = None;
                for k in 2..lits.len() {
                    let l = lits[k];
                    let v = self.values[l.var() as usize];
                    let lv = if l.is_positive() { v } else { -v };
                    if lv != -1 {
                        found = Some(k);
                        break;
                    }
                }
                if let Some(k) = found {
                    lits.swap(1, k);
                    let nw = lits[1];
                    self.watches[idx(!nw)].push(Watch {
                        clause: w.clause,
                        blocker: first,
                    });
                    continue;
                }
                ws[j] = w;
                j += 1;
                if fv == -1 {
                    conflict = Some(w.clause);
                    while i < ws.len() {
                        ws[j] = ws[i];
                        i += 1;
                        j += 1;
                    }
                } else {
                    self.assign(first, w.clause);
                }
            }
            ws.truncate(j);
            let slot = &mut self.watches[idx(p)];
            ws.append(slot);
            *slot = ws;
            if conflict.is_some() {
                return conflict;
            }
        }
        None
    }

    fn bump(&mut self, v: u32) {
        self.activity[v as usize] += self.var_inc;
        if self.activity[v as usize] > 1e100 {
            for a in &mut self.activity {
                *a *= 1e-100;
            }
            self.var_inc *= 1e-100;
        }
        if self.order.contains(v) {
            self.order.up(self.order.pos[v as usize], &self.activity);
        }
    }

    /// First-UIP clause (asserting literal first) and the level to return to.
    fn analyze(&mut self, mut confl: u32) -> (Vec<Lit>, u32) {
        let current = self.trail_lim.len() as u32;
        let mut learnt = vec![Lit::pos(1)];
        let mut pending = 0;
        let mut p: Option<Lit> = None;
        let mut i = self.trail.len();
        loop {
            let start = usize::from(p.is_some());
            for k in start..self.clauses[confl as usize].lits.len() {
                let q = self.clauses[confl as usize].lits[k];
                let v = q.var() as usize;
                if !self.seen[v] && self.level[v] > 0 {
                    self.seen[v] = true;
                    self.bump(v as u32);
                    if self.level[v] >= current {
                        pending += 1;
                    } else {
                        learnt.push(q);
                    }
                }
            }
            loop {
                i -= 1;
                if self.seen[self.trail[i].var() as usize] {
                    break;
                }
            }
            let lit = self.trail[i];
            p = Some(lit);
            confl = self.reason[lit.var() as usize];
            self.seen[lit.var() as usize] = false;
            pending -= 1;
            if pending == 0 {
                break;
            }
        }
        learnt[0] = !p.expect("conflict at a decision level");

        // Drop literals implied by the rest of the clause.
        let keep: Vec<bool> = learnt
            .iter()
            .enumerate()
            .map(|(k, &l)| {
                if k == 0 {
                    return true;
                }
                let r = self.reason[l.var() as usize];
                r == NO_REASON
                    || self.clauses[r as usize].lits[1..].iter().any(|q| {
                        let v = q.var() as usize;
                        !self.seen[v] && self.level[v] > 0
                    })
            })
            .collect();
        for l in &learnt[1..] {
            self.seen[l.var() as usize] = false;
        }
        let mut learnt: Vec<Lit> = learnt
            .into_iter()
            .zip(keep)
            .filter(|(_, k)| *k)
            .map(|(l, _)| l)
            .collect();

        let back = if learnt.len() == 1 {
            0
        } else {
            let (best, _) = learnt
                .iter()
                .enumerate()
                .skip(1)
                .max_by_key(|(_, l)| self.level[l.var() as usize])
                .expect("at least two literals");
            learnt.swap(1, best);
            self.level[learnt[1].var() as usize]
        };
        (learnt, back)
    }

    fn lbd(&mut self, lits: &[Lit]) -> u32 {
        let mut levels: Vec<u32> = lits.iter().map(|l| self.level[l.var() as usize]).collect();
        levels.sort_unstable();
        levels.dedup();
        levels.len() as u32
    }

    fn cancel_until(&mut self, lvl: u32) {
        if self.trail_lim.len() as u32 > lvl {
            let keep = self.trail_lim[lvl as usize];
            for k in (keep..self.trail.len()).rev() {
                let l = self.trail[k];
                let v = l.var() as usize;
                self.phase[v] = l.is_positive();
                self.values[v] = UNDEF;
                self.reason[v] = NO_REASON;
                self.order.insert(v as u32, &self.activity);
            }
            self.trail.truncate(keep);
            self.trail_lim.truncate(lvl as usize);
            self.qhead = keep;
        }
    }

    fn decide(&mut self) -> Option<Lit> {
        while let Some(v) = self.order.pop(&self.activity) {
            if self.values[v as usize] == UNDEF {
                return Some(if self.phase[v as usize] {
                    Lit::pos(v)
                } else {
                    !Lit::pos(v)
                });
            }
        }
        None
    }

    /// At level 0: drops satisfied clauses, false literals and the worse
    /// half of the learnt clauses, then rebuilds every watch list.
    fn simplify_and_reduce(&mut self) {
        debug_assert!(self.trail_lim.is_empty());
        let learnt_count = self.clauses.iter().filter(|c| c.learnt).count();
        let mut cutoff = u32::MAX;
        if learnt_count > self.max_learnts {
            let mut lbds: Vec<u32> = self.clauses.iter().filter(|c| c.learnt).map(|c| c.lbd).collect();
            lbds.sort_unstable();
            cutoff = lbds[lbds.len() / 2].max(3);
            self.max_learnts += self.max_learnts / 10;
        }
        let values = &self.values;
        let val = |l: Lit| {
            let v = values[l.var() as usize];
            if l.is_positive() {
                v
            } else {
                -v
            }
        };
        let mut kept = Vec::with_capacity(self.clauses.len());
        for mut c in std::mem::take(&mut self.clauses) {
            if c.lits.iter().any(|&l| val(l) == 1) {
                continue;
            }
            if c.learnt && c.lbd >= cutoff {
                continue;
            }
            c.lits.retain(|&l| val(l) != -1);
            debug_assert!(c.lits.len() >= 2, "units are propagated at level 0");
            kept.push(c);
        }
        for w in &mut self.watches {
            w.clear();
        }
        kept.sort_by_key(|c| c.learnt);
        self.originals = kept.iter().filter(|c| !c.learnt).count();
        for c in kept {
            self.attach(c.lits, c.learnt, c.lbd);
        }
        for r in &mut self.reason {
            *r = NO_REASON;
        }
    }

    pub fn run(mut self) -> SearchResult {
        if self.unsat {
            return SearchResult::Unsat;
        }
        let mut restart = 0u32;
        loop {
            let budget = 100 * luby(restart);
            restart += 1;
            match self.search(budget) {
                Some(r) => return r,
                None => {
                    self.cancel_until(0);
                    let learnts = self.clauses.len() - self.originals;
                    if learnts > self.max_learnts {
                        self.simplify_and_reduce();
                    }
                }
            }
        }
    }

    /// Searches until `budget` conflicts; `None` asks for a restart.
    fn search(&mut self, budget: u64) -> Option<SearchResult> {
        let mut local = 0;
        loop {
            if let Some(confl) = self.propagate() {
                self.conflicts += 1;
                local += 1;
                if self.trail_lim.is_empty() {
                    return Some(SearchResult::Unsat);
                }
                let (learnt, back) = self.analyze(confl);
                self.cancel_until(back);
                if learnt.len() == 1 {
                    self.assign(learnt[0], NO_REASON);
                } else {
                    let lbd = self.lbd(&learnt);
                    let asserting = learnt[0];
                    let ci = self.attach(learnt, true, lbd);
                    self.assign(asserting, ci);
                }
                self.var_inc /= 0.95;
                if self.conflicts.is_multiple_of(256) && self.budget.expired() {
                    return Some(SearchResult::Interrupted);
                }
            } else {
                if local >= budget {
                    return None;
                }
                match self.decide() {
                    None => {
                        let model = self.values.iter().map(|&v| v == 1).collect();
                        return Some(SearchResult::Sat(model));
                    }
                    Some(l) => {
                        self.trail_lim.push(self.trail.len());
                        self.assign(l, NO_REASON);
                    }
                }
            }
        }
    }

    pub fn solve(self) -> Option<Vec<bool>> {
        match self.run() {
            SearchResult::Sat(m) => Some(m),
            _ => None,
        }
    }

    pub fn var_count(&self) -> usize {
        self.n
    }
}

/// The Luby sequence 1, 1, 2, 1, 1, 2, 4, ...
fn luby(i: u32) -> u64 {
    let mut size = 1u64;
    let mut seq = 0u32;
    let x = i as u64;
    while size < x + 1 {
        seq += 1;
        size = 2 * size + 1;
    }
    let mut x = x;
    while size - 1 != x {
        size = (size - 1) >> 1;
        seq -= 1;
        x %= size;
    }
    1 << seq
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::internal::brute_force;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn luby_prefix() {
        let got: Vec<u64> = (0..15).map(luby).collect();
        assert_eq!(got, [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]);
    }

    #[test]
    fn agrees_with_truth_table_on_random_3cnf() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..400 {
            let n = rng.random_range(3..=14u32);
            let m = rng.random_range(1..=(5 * n) as usize);
            let clauses = (0..m)
                .map(|_| {
                    (0..3)
                        .map(|_| {
                            let l = Lit::pos(rng.random_range(1..=n));
                            if rng.random_bool(0.5) {
                                l
                            } else {
                                !l
                            }
                        })
                        .collect()
                })
                .collect();
            let f = CnfFormula {
                var_count: n,
                clauses,
                meta: vec![],
            };
            let expect = brute_force(&f).unwrap().is_some();
            match Cdcl::new(&f).run() {
                SearchResult::Sat(m) => {
                    assert!(expect);
                    assert!(f.eval(&m));
                }
                SearchResult::Unsat => assert!(!expect),
                SearchResult::Interrupted => unreachable!(),
            }
        }
    }

    #[test]
    fn pigeonhole_seven_into_six() {
        let p = |i: u32, j: u32| Lit::pos(6 * (i - 1) + j);
        let mut clauses: Vec<Vec<Lit>> = (1..=7).map(|i| (1..=6).map(|j| p(i, j)).collect()).collect();
        for j in 1..=6 {
            for a in 1..=7 {
                for b in a + 1..=7 {
                    clauses.push(vec![!p(a, j), !p(b, j)]);
                }
            }
        }
        let f = CnfFormula {
            var_count: 42,
            clauses,
            meta: vec![],
        };
        assert_eq!(Cdcl::new(&f).run(), SearchResult::Unsat);
    }

    #[test]
    fn assumptions_restrict() {
        let f = CnfFormula {
            var_count: 2,
            clauses: vec![vec![Lit::pos(1), Lit::pos(2)]],
            meta: vec![],
        };
        let m = Cdcl::with_assumptions(&f, &[!Lit::pos(1)]).solve().unwrap();
        assert!(!m[1] && m[2]);
        assert!(Cdcl::with_assumptions(&f, &[!Lit::pos(1), !Lit::pos(2)])
            .solve()
            .is_none());
    }
}
