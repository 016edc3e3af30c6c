//! CNF gadgets. Every auxiliary is defined by a full equivalence, so each
//! assignment of the input literals extends to exactly one model of the
//! gadget.

use serde::{Deserialize, Serialize};

use super::{CnfBuilder, Lit};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GadgetConfig {
    /// Exact-one lists up to this length use the pairwise encoding; longer
    /// ones use the sequential ladder.
    pub pairwise_max: usize,
    /// Inputs per link of a chained XOR.
    pub xor_chunk: usize,
}

impl Default for GadgetConfig {
    fn default() -> Self {
        GadgetConfig {
            pairwise_max: 6,
            xor_chunk: 3,
        }
    }
}

impl CnfBuilder {
    pub fn unit(&mut self, l: Lit) {
        self.add_clause([l]);
    }

    pub fn implies(&mut self, a: Lit, b: Lit) {
        self.add_clause([!a, b]);
    }

    pub fn equiv(&mut self, a: Lit, b: Lit) {
        self.add_clause([!a, b]);
        self.add_clause([a, !b]);
    }

    /// `out <-> (ins[0] & ins[1] & ...)`; empty `ins` forces `out`.
    pub fn and_gate(&mut self, out: Lit, ins: &[Lit]) {
        for &i in ins {
            self.add_clause([!out, i]);
        }
        self.add_clause(ins.iter().map(|&i| !i).chain([out]));
    }

    /// `out <-> (ins[0] | ins[1] | ...)`; empty `ins` forbids `out`.
    pub fn or_gate(&mut self, out: Lit, ins: &[Lit]) {
        for &i in ins {
            self.add_clause([!i, out]);
        }
        self.add_clause(ins.iter().copied().chain([!out]));
    }

    pub fn at_most_one_pairwise(&mut self, lits: &[Lit]) {
        for (i, &a) in lits.iter().enumerate() {
            for &b in &lits[i + 1..] {
                self.add_clause([!a, !b]);
            }
        }
    }

    /// Exactly one of `lits`. An empty list is a contradiction.
    pub fn exact_one(&mut self, lits: &[Lit], tag: &str) {
        match lits.len() {
            0 => self.contradiction(),
            1 => self.unit(lits[0]),
            len if len <= self.config().pairwise_max => {
                self.add_clause(lits.iter().copied());
                self.at_most_one_pairwise(lits);
            }
            _ => self.exact_one_ladder(lits, tag),
        }
    }

    /// Sequential encoding with prefix-or auxiliaries `s_i <-> x_1 | ... | x_i`.
    fn exact_one_ladder(&mut self, lits: &[Lit], tag: &str) {
        let n = lits.len();
        let mut prefix = lits[0];
        for (i, &x) in lits.iter().enumerate().skip(1) {
            self.add_clause([!x, !prefix]);
            if i == n - 1 {
                self.add_clause([prefix, x]);
            } else {
                let s = self.aux(tag);
                self.or_gate(s, &[prefix, x]);
                prefix = s;
            }
        }
    }

    /// `target <-> xor(inputs)`, chained through auxiliaries in groups of
    /// `xor_chunk`.
    pub fn xor_to_cnf(&mut self, target: Lit, inputs: &[Lit], tag: &str) {
        let chunk = self.config().xor_chunk.max(2);
        let mut items: Vec<Lit> = inputs.to_vec();
        while items.len() > chunk {
            let group: Vec<Lit> = items.drain(..chunk).collect();
            let link = self.aux(tag);
            self.parity_eq(link, &group);
            items.insert(0, link);
        }
        self.parity_eq(target, &items);
    }

    /// Direct encoding of `out <-> xor(ins)`: forbids each of the `2^k`
    /// assignments with the wrong parity.
    fn parity_eq(&mut self, out: Lit, ins: &[Lit]) {
        let all: Vec<Lit> = std::iter::once(out).chain(ins.iter().copied()).collect();
        for mask in 0u32..(1 << all.len()) {
            if mask.count_ones() % 2 == 1 {
                let clause = all
                    .iter()
                    .enumerate()
                    .map(|(j, &l)| if mask >> j & 1 == 1 { !l } else { l });
                self.add_clause(clause);
            }
        }
    }

    /// Unary counter over `lits`: returns `o_1..o_m` with
    /// `o_j <-> (#true lits >= j)`, `m = min(len, cap)`.
    pub fn totalizer(&mut self, lits: &[Lit], cap: usize, tag: &str) -> Vec<Lit> {
        let cap = cap.max(1);
        if lits.len() <= 1 {
            return lits.to_vec();
        }
        let mid = lits.len() / 2;
        let left = self.totalizer(&lits[..mid], cap, tag);
        let right = self.totalizer(&lits[mid..], cap, tag);
        let m = lits.len().min(cap);
        let outs: Vec<Lit> = (0..m).map(|_| self.aux(tag)).collect();
        // Index a means "count >= a"; a = 0 is constant true.
        let at = |side: &[Lit], a: usize| if a == 0 { None } else { side.get(a - 1).copied() };
        for a in 0..=left.len() {
            for b in 0..=right.len() {
                if a + b >= 1 {
                    let o = outs[(a + b).min(m) - 1];
                    let clause = [at(&left, a).map(|l| !l), at(&right, b).map(|r| !r), Some(o)];
                    self.add_clause(clause.into_iter().flatten());
                }
                if a + b < m {
                    let o = outs[a + b];
                    let clause = [at(&left, a + 1), at(&right, b + 1), Some(!o)];
                    self.add_clause(clause.into_iter().flatten());
                }
            }
        }
        outs
    }

    /// `#true(xs) > #true(ys)`, compared on unary counters:
    /// `cx >= 1` and `cy >= j -> cx >= j + 1` for every `j`.
    pub fn count_greater(&mut self, xs: &[Lit], ys: &[Lit], tag: &str) {
        let cx = self.totalizer(xs, ys.len() + 1, tag);
        let cy = self.totalizer(ys, xs.len(), tag);
        match cx.first() {
            Some(&x1) => self.unit(x1),
            None => {
                self.contradiction();
                return;
            }
        }
        for (j, &y) in cy.iter().enumerate() {
            match cx.get(j + 1) {
                Some(&x) => self.implies(y, x),
                None => self.unit(!y),
            }
        }
    }

    /// Exactly `k` of `lits`.
    pub fn exact_k(&mut self, lits: &[Lit], k: usize, tag: &str) {
        if k > lits.len() {
            self.contradiction();
        } else if k == 0 {
            lits.iter().for_each(|&l| self.unit(!l));
        } else if k == lits.len() {
            lits.iter().for_each(|&l| self.unit(l));
        } else {
            let outs = self.totalizer(lits, k + 1, tag);
            self.unit(outs[k - 1]);
            self.unit(!outs[k]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::VarName;
    use super::*;

    fn build(n: usize, f: impl FnOnce(&mut CnfBuilder, &[Lit])) -> (super::super::CnfFormula, Vec<Lit>) {
        let mut b = CnfBuilder::new();
        let xs: Vec<Lit> = (1..=n).map(|v| b.named(VarName::T(v))).collect();
        f(&mut b, &xs);
        (b.finish().0, xs)
    }

    #[test]
    fn singleton_exact_one_is_a_unit() {
        let (f, xs) = build(1, |b, xs| b.exact_one(xs, "eo"));
        assert_eq!(f.clauses, vec![vec![xs[0]]]);
    }

    #[test]
    fn unit_parity_is_two_clauses() {
        let (f, _) = build(2, |b, xs| b.xor_to_cnf(xs[0], &xs[1..], "x"));
        assert_eq!(f.clauses.len(), 2);
        assert_eq!(f.var_count, 2);
    }

    #[test]
    fn k_zero_and_k_full_are_units() {
        let (f, xs) = build(3, |b, xs| b.exact_k(xs, 0, "k"));
        assert_eq!(f.clauses, xs.iter().map(|&x| vec![!x]).collect::<Vec<_>>());
        let (f, xs) = build(3, |b, xs| b.exact_k(xs, 3, "k"));
        assert_eq!(f.clauses, xs.iter().map(|&x| vec![x]).collect::<Vec<_>>());
    }

    #[test]
    fn ladder_kicks_in_above_threshold() {
        let (f, _) = build(7, |b, xs| b.exact_one(xs, "eo"));
        assert!(f.var_count > 7);
        let (f, _) = build(6, |b, xs| b.exact_one(xs, "eo"));
        assert_eq!(f.var_count, 6);
    }
}
