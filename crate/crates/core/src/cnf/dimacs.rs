use std::fmt::Write as _;

use super::{CnfFormula, Lit};
use crate::error::{Error, Result};

pub(crate) fn write(f: &CnfFormula) -> String {
    let mut out = String::new();
    for (k, v) in &f.meta {
        let _ = writeln!(out, "c {k}: {v}");
    }
    let _ = writeln!(out, "p cnf {} {}", f.var_count, f.clauses.len());
    write_clauses(&mut out, &f.clauses);
    out
}

pub(crate) fn write_clauses(out: &mut String, clauses: &[Vec<Lit>]) {
    for clause in clauses {
        for l in clause {
            let _ = write!(out, "{l} ");
        }
        out.push_str("0\n");
    }
}

/// The `p` line of a DIMACS or QDIMACS file.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DimacsHeader {
    pub vars: u32,
    pub clauses: usize,
}

/// Parses DIMACS CNF. `c key: value` comments come back as metadata;
/// QDIMACS `a`/`e` lines are rejected.
pub fn parse_dimacs(text: &str) -> Result<CnfFormula> {
    let mut header: Option<DimacsHeader> = None;
    let mut formula = CnfFormula::default();
    let mut current: Vec<Lit> = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line == "%" {
            continue;
        }
        if let Some(comment) = line.strip_prefix('c') {
            if let Some((k, v)) = comment.trim().split_once(": ") {
                formula.meta.push((k.to_string(), v.to_string()));
            }
            continue;
        }
        if let Some(rest) = line.strip_prefix("p ") {
            let parts: Vec<&str> = rest.split_whitespace().collect();
            match parts.as_slice() {
                ["cnf", v, c] => {
                    let vars = v.parse().map_err(|_| Error::parse(lineno + 1, "bad variable count"))?;
                    let clauses = c.parse().map_err(|_| Error::parse(lineno + 1, "bad clause count"))?;
                    header = Some(DimacsHeader { vars, clauses });
                }
                _ => return Err(Error::parse(lineno + 1, "expected `p cnf <vars> <clauses>`")),
            }
            continue;
        }
        let Some(h) = header else {
            return Err(Error::parse(lineno + 1, "clause before header"));
        };
        for tok in line.split_whitespace() {
            let raw: i32 = tok
                .parse()
                .map_err(|_| Error::parse(lineno + 1, format!("bad literal {tok:?}")))?;
            if raw == 0 {
                formula.clauses.push(std::mem::take(&mut current));
            } else {
                if raw.unsigned_abs() > h.vars {
                    return Err(Error::parse(
                        lineno + 1,
                        format!("literal {raw} exceeds {} variables", h.vars),
                    ));
                }
                current.push(Lit::from_dimacs(raw));
            }
        }
    }
    let h = header.ok_or_else(|| Error::parse(0, "missing `p cnf` header"))?;
    if !current.is_empty() {
        formula.clauses.push(current);
    }
    if formula.clauses.len() != h.clauses {
        return Err(Error::parse(
            0,
            format!("header declares {} clauses, found {}", h.clauses, formula.clauses.len()),
        ));
    }
    formula.var_count = h.vars;
    Ok(formula)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_exact_output() {
        let f = CnfFormula {
            var_count: 3,
            clauses: vec![vec![Lit::pos(1), !Lit::pos(2)], vec![Lit::pos(3)]],
            meta: vec![("encoding".into(), "tutte-cnf".into())],
        };
        let text = f.to_dimacs();
        assert_eq!(text, "c encoding: tutte-cnf\np cnf 3 2\n1 -2 0\n3 0\n");
        assert_eq!(parse_dimacs(&text).unwrap(), f);
    }

    #[test]
    fn rejects_malformed() {
        assert!(parse_dimacs("1 2 0\n").is_err());
        assert!(parse_dimacs("p cnf 1 1\n2 0\n").is_err());
        assert!(parse_dimacs("p cnf 2 2\n1 0\n").is_err());
        assert!(parse_dimacs("p dnf 2 2\n").is_err());
    }
}
