//! The Tutte encoding as a logic program. An answer set is a legal coloring
//! with a Tutte set of its induced graph.

use std::fmt::Write as _;

use crate::coloring::{LegalColoringSpec, VertexColoring};
use crate::encode::tutte::{check_symmetric_set, TutteOptions, Witness};
use crate::error::{Error, Result};
use crate::graph::BicoloredGraph;

pub fn emit_asp_tutte(g: &BicoloredGraph, opts: &TutteOptions) -> Result<String> {
    if !g.removed().is_empty() {
        return Err(Error::InvalidGraph(
            "encoders need a graph without deleted vertices".into(),
        ));
    }
    opts.legal.check_graph(g)?;
    if let Some(u) = &opts.gs {
        check_symmetric_set(g, &opts.legal, u)?;
    }
    let (n, d) = (g.n(), g.d());
    let mut p = String::new();
    let _ = writeln!(
        p,
        "% tutte-asp graph={:016x} legal={} opt={}",
        g.fingerprint(),
        opts.legal,
        opts.opt
    );
    let _ = writeln!(p, "vertex(1..{n}).");
    let _ = writeln!(p, "color(1..{d}).");
    let _ = writeln!(p, "idx(1..{n}).");
    for (i, e) in g.edges().iter().enumerate() {
        let _ = writeln!(p, "edge({i},{},{},{},{}).", e.u, e.cu, e.v, e.cv);
    }
    p.push_str("1 { vc(V,C) : color(C) } 1 :- vertex(V).\n");
    match &opts.legal {
        LegalColoringSpec::Ghz { .. } => p.push_str(":- vc(V,C), vertex(W), not vc(W,C).\n"),
        LegalColoringSpec::W { .. } => p.push_str(":- #count { V : vc(V,1) } != 1.\n"),
        LegalColoringSpec::Dicke { k, .. } => {
            let _ = writeln!(p, ":- #count {{ V : vc(V,1) }} != {k}.");
        }
        LegalColoringSpec::Explicit { colorings, .. } => {
            for (j, c) in colorings.iter().enumerate() {
                for v in 1..=n {
                    let _ = writeln!(p, "want({},{v},{}).", j + 1, c.color(v));
                }
            }
            let _ = writeln!(p, "choice(1..{}).", colorings.len());
            p.push_str("1 { sel(J) : choice(J) } 1.\n");
            p.push_str(":- sel(J), want(J,V,C), not vc(V,C).\n");
        }
    }
    p.push_str("{ t(V) } :- vertex(V).\n");
    if opts.opt {
        p.push_str("1 { cc(V,I) : idx(I), I <= V } 1 :- vertex(V), not t(V).\n");
    } else {
        p.push_str("1 { cc(V,I) : idx(I) } 1 :- vertex(V), not t(V).\n");
    }
    p.push_str("e(I) :- edge(I,U,A,V,B), vc(U,A), vc(V,B), not t(U), not t(V).\n");
    p.push_str(":- e(I), edge(I,U,_,V,_), cc(U,C), not cc(V,C).\n");
    p.push_str(":- e(I), edge(I,U,_,V,_), cc(V,C), not cc(U,C).\n");
    p.push_str("odd(I) :- idx(I), M = #count { V : cc(V,I) }, M \\ 2 = 1.\n");
    p.push_str("removed(S) :- S = #count { V : t(V) }.\n");
    p.push_str(":- removed(S), #count { I : odd(I) } <= S.\n");
    if opts.opt {
        p.push_str(":- cc(U,V), t(V), U > V.\n");
        p.push_str(":- cc(U,V), cc(V,I), I < V, U > V.\n");
    }
    if let Some(u) = &opts.gs {
        for w in u.windows(2) {
            let _ = writeln!(p, ":- t({}), not t({}).", w[1], w[0]);
        }
    }
    p.push_str("#show vc/2.\n#show t/1.\n#show cc/2.\n");
    Ok(p)
}

fn parse_atom(atom: &str) -> Option<(&str, Vec<usize>)> {
    let (name, rest) = atom.split_once('(')?;
    let args = rest
        .strip_suffix(')')?
        .split(',')
        .map(|a| a.trim().parse().ok())
        .collect::<Option<Vec<usize>>>()?;
    Some((name, args))
}

/// Builds a witness from the shown atoms of an answer set.
pub fn decode_answer(atoms: &[String], n: usize) -> Result<Witness> {
    let mut colors: Vec<Option<usize>> = vec![None; n];
    let mut tutte_set = Vec::new();
    let mut components = vec![None; n];
    for atom in atoms {
        let bad = || Error::MalformedModel(format!("unexpected atom {atom:?}"));
        let (name, args) = parse_atom(atom).ok_or_else(bad)?;
        match (name, args.as_slice()) {
            ("vc", &[v, c]) if (1..=n).contains(&v) => colors[v - 1] = Some(c),
            ("t", &[v]) if (1..=n).contains(&v) => tutte_set.push(v),
            ("cc", &[v, i]) if (1..=n).contains(&v) => components[v - 1] = Some(i),
            _ => return Err(bad()),
        }
    }
    tutte_set.sort_unstable();
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

const OPERATORS: [&str; 18] = [
    ":-", "..", "!=", "<=", ">=", "=", "<", ">", ":", ",", ";", "+", "-", "*", "/", "\\", "|", "_",
];

#[derive(Debug, PartialEq, Eq)]
enum Token<'a> {
    Word(&'a str),
    Directive(&'a str),
    Number,
    Op(&'a str),
    Open(char),
    Close(char),
}

fn tokenize(stmt: &str) -> std::result::Result<Vec<Token<'_>>, String> {
    let bytes = stmt.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_alphabetic()
            || (c == '_' && bytes.get(i + 1).is_some_and(|b| b.is_ascii_alphanumeric()))
            || c == '#'
        {
            let start = i;
            i += 1;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &stmt[start..i];
            toks.push(if c == '#' {
                Token::Directive(word)
            } else {
                Token::Word(word)
            });
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            toks.push(Token::Number);
        } else if "({".contains(c) {
            toks.push(Token::Open(c));
            i += 1;
        } else if ")}".contains(c) {
            toks.push(Token::Close(c));
            i += 1;
        } else if let Some(op) = OPERATORS.iter().find(|op| stmt[i..].starts_with(**op)) {
            toks.push(Token::Op(op));
            i += op.len();
        } else {
            return Err(format!("unexpected character {c:?}"));
        }
    }
    Ok(toks)
}

fn check_statement(stmt: &str) -> std::result::Result<(), String> {
    let toks = tokenize(stmt)?;
    let mut depth: Vec<char> = Vec::new();
    let mut implications = 0;
    for t in &toks {
        match t {
            Token::Open(c) => depth.push(*c),
            Token::Close(c) => {
                let want = if *c == ')' { '(' } else { '{' };
                if depth.pop() != Some(want) {
                    return Err(format!("unbalanced {c:?}"));
                }
            }
            Token::Op(":-") if depth.is_empty() => implications += 1,
            Token::Op(":-") => return Err("`:-` inside brackets".into()),
            Token::Directive(d) if !matches!(*d, "#count" | "#sum" | "#show" | "#min" | "#max") => {
                return Err(format!("unknown directive {d}"));
            }
            _ => {}
        }
    }
    if !depth.is_empty() {
        return Err("unclosed bracket".into());
    }
    if implications > 1 {
        return Err("more than one `:-`".into());
    }
    match toks.first() {
        None => Err("empty statement".into()),
        Some(Token::Directive("#show")) => match &toks[1..] {
            [Token::Word(w), Token::Op("/"), Token::Number] if w.starts_with(|c: char| c.is_ascii_lowercase()) => {
                Ok(())
            }
            [] => Ok(()),
            _ => Err("expected `#show name/arity`".into()),
        },
        Some(Token::Op(op)) if *op != ":-" => Err(format!("statement starts with {op:?}")),
        _ => Ok(()),
    }
}

/// Minimal syntax check: statements end in `.`, brackets balance, at most
/// one `:-` per rule, tokens come from the supported subset of the
/// language. Reports the 1-based line of the first bad statement.
pub fn validate_asp(program: &str) -> Result<()> {
    let mut stmt = String::new();
    let mut start_line = 1;
    let mut depth = 0i32;
    for (lineno, raw) in program.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        for (j, &c) in chars.iter().enumerate() {
            if stmt.trim().is_empty() {
                start_line = lineno + 1;
            }
            match c {
                '(' | '{' => depth += 1,
                ')' | '}' => depth -= 1,
                _ => {}
            }
            let range_dot = c == '.' && (chars.get(j + 1) == Some(&'.') || (j > 0 && chars[j - 1] == '.'));
            if c == '.' && depth == 0 && !range_dot {
                check_statement(&stmt).map_err(|m| Error::parse(start_line, m))?;
                stmt.clear();
            } else {
                stmt.push(c);
            }
        }
        stmt.push('\n');
    }
    if !stmt.trim().is_empty() {
        return Err(Error::parse(start_line, "statement without a terminating `.`"));
    }
    Ok(())
}
