//! Pseudo-Boolean formulas with an optional XOR section.
//!
//! Text grammar (OPB plus one extension):
//!
//! ```text
//! * #variable= 3 #constraint= 2
//! +1 x1 -1 x2 >= 0 ;
//! xor x1 x2 x3 = 1 ;
//! ```
//!
//! A linear line is `coef var` pairs, `>=` or `=`, an integer and `;`.
//! `xor v1 ... vk = p ;` states that an odd (p = 1) or even (p = 0) number of
//! the listed variables is true. Plain OPB is the same without `xor` lines.

use std::fmt::Write as _;

use crate::cnf::{CnfBuilder, CnfFormula, GadgetConfig, Lit, VarMap};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PbOp {
    Ge,
    Eq,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PbConstraint {
    pub terms: Vec<(i64, u32)>,
    pub op: PbOp,
    pub rhs: i64,
}

impl PbConstraint {
    /// `sum coef * lit op rhs`, with negative literals rewritten as `1 - x`.
    pub fn over_lits(terms: impl IntoIterator<Item = (i64, Lit)>, op: PbOp, rhs: i64) -> Self {
        let mut c = PbConstraint {
            terms: Vec::new(),
            op,
            rhs,
        };
        for (coef, l) in terms {
            if l.is_positive() {
                c.terms.push((coef, l.var()));
            } else {
                c.terms.push((-coef, l.var()));
                c.rhs -= coef;
            }
        }
        c
    }

    /// The clause `l1 | l2 | ...` as `sum >= 1`.
    pub fn clause(lits: &[Lit]) -> Self {
        Self::over_lits(lits.iter().map(|&l| (1, l)), PbOp::Ge, 1)
    }

    fn lhs(&self, assignment: &[bool]) -> i64 {
        self.terms
            .iter()
            .map(|&(c, v)| if assignment[v as usize] { c } else { 0 })
            .sum()
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        let lhs = self.lhs(assignment);
        match self.op {
            PbOp::Ge => lhs >= self.rhs,
            PbOp::Eq => lhs == self.rhs,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XorConstraint {
    pub vars: Vec<u32>,
    /// Required parity of the number of true variables.
    pub odd: bool,
}

impl XorConstraint {
    /// `out <-> xor(ins)` over literals, i.e. `xor(out, ins) = 0`.
    pub fn definition(out: Lit, ins: &[Lit]) -> Self {
        let mut odd = false;
        let mut vars = Vec::new();
        for &l in std::iter::once(&out).chain(ins) {
            vars.push(l.var());
            odd ^= !l.is_positive();
        }
        XorConstraint { vars, odd }
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        let count = self.vars.iter().filter(|&&v| assignment[v as usize]).count();
        (count % 2 == 1) == self.odd
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PbFormula {
    pub var_count: u32,
    pub linear: Vec<PbConstraint>,
    pub xors: Vec<XorConstraint>,
    pub meta: Vec<(String, String)>,
}

fn write_terms(out: &mut String, terms: &[(i64, u32)]) {
    for &(c, v) in terms {
        let _ = write!(out, "{c:+} x{v} ");
    }
}

impl PbFormula {
    pub fn set_meta(&mut self, key: &str, value: impl ToString) {
        self.meta.push((key.to_string(), value.to_string()));
    }

    pub fn eval(&self, assignment: &[bool]) -> bool {
        self.linear.iter().all(|c| c.eval(assignment)) && self.xors.iter().all(|x| x.eval(assignment))
    }

    fn write(&self, with_xor: bool) -> String {
        let mut out = String::new();
        let count = self.linear.len() + if with_xor { self.xors.len() } else { 0 };
        let _ = writeln!(out, "* #variable= {} #constraint= {}", self.var_count, count);
        for (k, v) in &self.meta {
            let _ = writeln!(out, "* {k}: {v}");
        }
        for c in &self.linear {
            write_terms(&mut out, &c.terms);
            let op = match c.op {
                PbOp::Ge => ">=",
                PbOp::Eq => "=",
            };
            let _ = writeln!(out, "{op} {} ;", c.rhs);
        }
        if with_xor {
            for x in &self.xors {
                out.push_str("xor");
                for v in &x.vars {
                    let _ = write!(out, " x{v}");
                }
                let _ = writeln!(out, " = {} ;", u8::from(x.odd));
            }
        }
        out
    }

    /// Text with native `xor` lines.
    pub fn to_pbxor(&self) -> String {
        self.write(true)
    }

    /// Plain OPB. Fails if XOR constraints remain; see [`Self::xors_as_linear`].
    pub fn to_opb(&self) -> Result<String> {
        if !self.xors.is_empty() {
            return Err(Error::Unsupported(
                "OPB has no XOR constraints; convert them first".into(),
            ));
        }
        Ok(self.write(false))
    }

    /// Replaces each `xor(x) = p` by `sum x - 2 * sum 2^j y_j = p` over fresh
    /// binary-digit variables `y_j`.
    pub fn xors_as_linear(&self) -> PbFormula {
        let mut f = PbFormula {
            var_count: self.var_count,
            linear: self.linear.clone(),
            xors: Vec::new(),
            meta: self.meta.clone(),
        };
        for x in &self.xors {
            let p = i64::from(x.odd);
            let len = x.vars.len() as i64;
            let mut terms: Vec<(i64, u32)> = x.vars.iter().map(|&v| (1, v)).collect();
            if len < p {
                // xor() = 1 over no variables.
                f.var_count += 1;
                let y = f.var_count;
                f.linear.push(PbConstraint {
                    terms: vec![(1, y)],
                    op: PbOp::Ge,
                    rhs: 1,
                });
                f.linear.push(PbConstraint {
                    terms: vec![(-1, y)],
                    op: PbOp::Ge,
                    rhs: 0,
                });
                continue;
            }
            let mut max_half = (len - p) / 2;
            let mut weight = 2;
            while max_half > 0 {
                f.var_count += 1;
                terms.push((-weight, f.var_count));
                weight *= 2;
                max_half /= 2;
            }
            f.linear.push(PbConstraint {
                terms,
                op: PbOp::Eq,
                rhs: p,
            });
        }
        f
    }

    /// CNF through the totalizer and XOR gadgets. Only unit coefficients
    /// are supported. Ids `1..=var_count` are preserved.
    pub fn to_cnf(&self) -> Result<CnfFormula> {
        let mut vars = VarMap::new();
        for _ in 0..self.var_count {
            vars.aux("x");
        }
        let mut b = CnfBuilder::from_vars(vars, GadgetConfig::default());
        for c in &self.linear {
            if c.terms.iter().any(|&(coef, _)| coef.abs() != 1) {
                return Err(Error::Unsupported("CNF compilation needs unit coefficients".into()));
            }
            let mut rhs = c.rhs;
            let lits: Vec<Lit> = c
                .terms
                .iter()
                .map(|&(coef, v)| {
                    if coef > 0 {
                        Lit::pos(v)
                    } else {
                        rhs += 1;
                        !Lit::pos(v)
                    }
                })
                .collect();
            let len = lits.len() as i64;
            match c.op {
                PbOp::Eq if rhs < 0 || rhs > len => b.contradiction(),
                PbOp::Eq => b.exact_k(&lits, rhs as usize, "pb"),
                PbOp::Ge if rhs <= 0 => {}
                PbOp::Ge if rhs > len => b.contradiction(),
                PbOp::Ge if rhs == 1 => b.add_clause(lits),
                PbOp::Ge => {
                    let outs = b.totalizer(&lits, rhs as usize, "pb");
                    b.unit(outs[rhs as usize - 1]);
                }
            }
        }
        for x in &self.xors {
            match x.vars.split_first() {
                None if x.odd => b.contradiction(),
                None => {}
                Some((&first, rest)) => {
                    let target = if x.odd { !Lit::pos(first) } else { Lit::pos(first) };
                    let ins: Vec<Lit> = rest.iter().map(|&v| Lit::pos(v)).collect();
                    b.xor_to_cnf(target, &ins, "xor");
                }
            }
        }
        let (mut f, _) = b.finish();
        f.meta = self.meta.clone();
        Ok(f)
    }

    /// Parses OPB or PB+XOR text.
    pub fn parse(text: &str) -> Result<Self> {
        let mut f = PbFormula::default();
        let mut declared: Option<u32> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let at = lineno + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('*') {
                if let Some((_, rest)) = comment.split_once("#variable=") {
                    let n = rest.split_whitespace().next().and_then(|t| t.parse().ok());
                    declared = Some(n.ok_or_else(|| Error::parse(at, "bad #variable= count"))?);
                } else if let Some((k, v)) = comment.trim().split_once(": ") {
                    f.meta.push((k.to_string(), v.to_string()));
                }
                continue;
            }
            let body = line
                .strip_suffix(';')
                .ok_or_else(|| Error::parse(at, "constraint must end with `;`"))?;
            let toks: Vec<&str> = body.split_whitespace().collect();
            let var = |t: &str| -> Result<u32> {
                let v: u32 = t
                    .strip_prefix('x')
                    .and_then(|d| d.parse().ok())
                    .ok_or_else(|| Error::parse(at, format!("bad variable {t:?}")))?;
                if v == 0 {
                    return Err(Error::parse(at, "variable ids start at 1"));
                }
                match declared {
                    Some(d) if v <= d => Ok(v),
                    Some(d) => Err(Error::parse(at, format!("x{v} exceeds {d} declared variables"))),
                    None => Err(Error::parse(at, "constraint before `#variable=` header")),
                }
            };
            if toks.first() == Some(&"xor") {
                let eq = toks
                    .iter()
                    .position(|&t| t == "=")
                    .ok_or_else(|| Error::parse(at, "xor line needs `= p`"))?;
                let vars = toks[1..eq].iter().map(|t| var(t)).collect::<Result<Vec<_>>>()?;
                let odd = match toks.get(eq + 1..) {
                    Some(["0"]) => false,
                    Some(["1"]) => true,
                    _ => return Err(Error::parse(at, "xor parity must be 0 or 1")),
                };
                f.xors.push(XorConstraint { vars, odd });
                continue;
            }
            let opi = toks
                .iter()
                .position(|&t| t == ">=" || t == "=")
                .ok_or_else(|| Error::parse(at, "expected `>=` or `=`"))?;
            if opi % 2 == 1 || toks.len() != opi + 2 {
                return Err(Error::parse(at, "expected `coef var ... op rhs ;`"));
            }
            let mut terms = Vec::new();
            for pair in toks[..opi].chunks(2) {
                let coef: i64 = pair[0]
                    .parse()
                    .map_err(|_| Error::parse(at, format!("bad coefficient {:?}", pair[0])))?;
                terms.push((coef, var(pair[1])?));
            }
            let op = if toks[opi] == ">=" { PbOp::Ge } else { PbOp::Eq };
            let rhs = toks[opi + 1]
                .parse()
                .map_err(|_| Error::parse(at, "bad right-hand side"))?;
            f.linear.push(PbConstraint { terms, op, rhs });
        }
        f.var_count = declared.ok_or_else(|| Error::parse(0, "missing `#variable=` header"))?;
        Ok(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::internal::brute_force_models;

    #[test]
    fn round_trip() {
        let f = PbFormula {
            var_count: 3,
            linear: vec![PbConstraint::clause(&[Lit::pos(1), !Lit::pos(2)])],
            xors: vec![XorConstraint {
                vars: vec![1, 2, 3],
                odd: true,
            }],
            meta: vec![("encoding".into(), "test".into())],
        };
        let text = f.to_pbxor();
        assert_eq!(
            text,
            "* #variable= 3 #constraint= 2\n* encoding: test\n+1 x1 -1 x2 >= 0 ;\nxor x1 x2 x3 = 1 ;\n"
        );
        assert_eq!(PbFormula::parse(&text).unwrap(), f);
        assert!(f.to_opb().is_err());
    }

    #[test]
    fn xor_conversion_preserves_projection() {
        for len in 1..=5u32 {
            for odd in [false, true] {
                let f = PbFormula {
                    var_count: len,
                    linear: vec![],
                    xors: vec![XorConstraint {
                        vars: (1..=len).collect(),
                        odd,
                    }],
                    meta: vec![],
                };
                let lin = f.xors_as_linear();
                for a in 0u32..1 << len {
                    let base: Vec<bool> = std::iter::once(false)
                        .chain((0..len).map(|i| a >> i & 1 == 1))
                        .collect();
                    let extra = lin.var_count - len;
                    let completions = (0u32..1 << extra)
                        .filter(|y| {
                            let mut full = base.clone();
                            full.extend((0..extra).map(|j| y >> j & 1 == 1));
                            lin.eval(&full)
                        })
                        .count();
                    assert_eq!(completions, usize::from(f.eval(&base)), "len {len} odd {odd} a {a}");
                }
            }
        }
    }

    #[test]
    fn cnf_compilation_matches_semantics() {
        let f = PbFormula {
            var_count: 4,
            linear: vec![
                PbConstraint {
                    terms: vec![(1, 1), (1, 2), (-1, 3)],
                    op: PbOp::Ge,
                    rhs: 1,
                },
                PbConstraint {
                    terms: vec![(1, 2), (1, 4)],
                    op: PbOp::Eq,
                    rhs: 1,
                },
            ],
            xors: vec![XorConstraint {
                vars: vec![1, 3, 4],
                odd: false,
            }],
            meta: vec![],
        };
        let cnf = f.to_cnf().unwrap();
        let mut projected: Vec<Vec<bool>> = brute_force_models(&cnf)
            .unwrap()
            .into_iter()
            .map(|m| m[..=4].to_vec())
            .collect();
        projected.sort();
        let mut expected: Vec<Vec<bool>> = (0u32..16)
            .map(|a| {
                std::iter::once(false)
                    .chain((0..4).map(|i| a >> i & 1 == 1))
                    .collect::<Vec<_>>()
            })
            .filter(|a| f.eval(a))
            .collect();
        expected.sort();
        assert_eq!(projected, expected);
    }

    #[test]
    fn parse_errors() {
        assert!(PbFormula::parse("+1 x1 >= 1 ;\n").is_err());
        assert!(PbFormula::parse("* #variable= 1 #constraint= 1\n+1 x1 >= 1\n").is_err());
        assert!(PbFormula::parse("* #variable= 1 #constraint= 1\nxor x1 = 2 ;\n").is_err());
    }
}
