//! Brute-force ground truth. Everything here works straight from the
//! definitions (exhaustive pairing, subset scans) and shares no code with the
//! blossom or encoding paths. Hard size guards keep it out of production use.

use itertools::Itertools;

use crate::coloring::{LegalColoringSpec, VertexColoring};
use crate::error::{Error, Result};
use crate::graph::{BicoloredGraph, Edge, Vertex};
use crate::matching::Decision;

pub const MAX_VERTICES: usize = 12;
pub const MAX_COLORINGS: u128 = 10_000;
pub const MAX_SUBSET_EDGES: usize = 40;

fn guard_vertices(g: &BicoloredGraph) -> Result<()> {
    if g.n() > MAX_VERTICES {
        return Err(Error::OracleGuard(format!(
            "{} vertices exceeds the oracle cap of {MAX_VERTICES}",
            g.n()
        )));
    }
    Ok(())
}

/// Distinct simple neighbours of every vertex, built directly from the edges.
fn neighbours(g: &BicoloredGraph, edges: &[Edge]) -> Vec<Vec<Vertex>> {
    let mut adj = vec![Vec::new(); g.n() + 1];
    for e in edges {
        if !adj[e.u].contains(&e.v) {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
    }
    adj
}

fn pair_up(adj: &[Vec<Vertex>], free: &mut [bool]) -> bool {
    let Some(v) = free.iter().position(|&f| f) else {
        return true;
    };
    free[v] = false;
    for &w in &adj[v] {
        if free[w] {
            free[w] = false;
            if pair_up(adj, free) {
                free[w] = true;
                free[v] = true;
                return true;
            }
            free[w] = true;
        }
    }
    free[v] = true;
    false
}

fn has_pm_on(g: &BicoloredGraph, edges: &[Edge]) -> bool {
    let adj = neighbours(g, edges);
    let mut free: Vec<bool> = (0..=g.n()).map(|v| v >= 1 && g.is_active(v)).collect();
    pair_up(&adj, &mut free)
}

/// Perfect-matching existence by recursive pairing of the lowest free vertex.
pub fn brute_pm(g: &BicoloredGraph) -> Result<bool> {
    guard_vertices(g)?;
    Ok(has_pm_on(g, g.edges()))
}

/// All perfect matchings as lists of edge indices (parallel edges give
/// distinct matchings).
pub fn brute_perfect_matchings(g: &BicoloredGraph) -> Result<Vec<Vec<usize>>> {
    guard_vertices(g)?;
    fn go(g: &BicoloredGraph, free: &mut Vec<bool>, chosen: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        let Some(v) = free.iter().position(|&f| f) else {
            out.push(chosen.clone());
            return;
        };
        for (idx, e) in g.edges().iter().enumerate() {
            let other = if e.u == v {
                e.v
            } else if e.v == v {
                e.u
            } else {
                continue;
            };
            if free[other] {
                free[v] = false;
                free[other] = false;
                chosen.push(idx);
                go(g, free, chosen, out);
                chosen.pop();
                free[v] = true;
                free[other] = true;
            }
        }
    }
    let mut free: Vec<bool> = (0..=g.n()).map(|v| v >= 1 && g.is_active(v)).collect();
    let mut out = Vec::new();
    go(g, &mut free, &mut Vec::new(), &mut out);
    Ok(out)
}

/// The coloring a perfect matching induces on its vertices.
pub fn inherited_coloring(g: &BicoloredGraph, matching: &[usize]) -> VertexColoring {
    let mut colors = vec![0; g.n()];
    for &idx in matching {
        let e = g.edges()[idx];
        colors[e.u - 1] = e.cu;
        colors[e.v - 1] = e.cv;
    }
    VertexColoring::new(colors)
}

/// Whether `g` has a perfect matching whose inherited coloring is `c`,
/// decided on the full edge set without the induced-graph reduction.
pub fn brute_pm_with_coloring(g: &BicoloredGraph, c: &VertexColoring) -> Result<bool> {
    Ok(brute_perfect_matchings(g)?
        .iter()
        .any(|pm| &inherited_coloring(g, pm) == c))
}

/// Maximum matching size by include/exclude search over edge subsets.
pub fn brute_max_matching_size(g: &BicoloredGraph) -> Result<usize> {
    if g.edge_count() > MAX_SUBSET_EDGES {
        return Err(Error::OracleGuard(format!(
            "{} edges exceeds the subset-search cap of {MAX_SUBSET_EDGES}",
            g.edge_count()
        )));
    }
    fn go(edges: &[Edge], used: &mut Vec<bool>, size: usize, best: &mut usize) {
        if size + edges.len() <= *best {
            return;
        }
        let Some((e, rest)) = edges.split_first() else {
            *best = (*best).max(size);
            return;
        };
        if !used[e.u] && !used[e.v] {
            used[e.u] = true;
            used[e.v] = true;
            go(rest, used, size + 1, best);
            used[e.u] = false;
            used[e.v] = false;
        }
        go(rest, used, size, best);
    }
    let mut best = 0;
    go(g.edges(), &mut vec![false; g.n() + 1], 0, &mut best);
    Ok(best)
}

/// FORALL-PMVC by enumerating `C` and pairing on each color-filtered graph.
pub fn brute_forall_pmvc(g: &BicoloredGraph, spec: &LegalColoringSpec) -> Result<Decision> {
    guard_vertices(g)?;
    spec.check_graph(g)?;
    if spec.cardinality() > MAX_COLORINGS {
        return Err(Error::OracleGuard(format!(
            "|C| = {} exceeds the oracle cap of {MAX_COLORINGS}",
            spec.cardinality()
        )));
    }
    for c in spec.colorings() {
        let kept: Vec<Edge> = g
            .edges()
            .iter()
            .copied()
            .filter(|e| c.color(e.u) == e.cu && c.color(e.v) == e.cv)
            .collect();
        if !has_pm_on(g, &kept) {
            return Ok(Decision::Violated(c));
        }
    }
    Ok(Decision::Satisfies)
}

/// Odd components of `g` minus `removed`, by union-find over the edge list.
pub fn odd_components_without(g: &BicoloredGraph, removed: &[Vertex]) -> usize {
    let n = g.n();
    let mut gone = vec![false; n + 1];
    for v in (1..=n).filter(|&v| !g.is_active(v)).chain(removed.iter().copied()) {
        gone[v] = true;
    }
    let mut parent: Vec<usize> = (0..=n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut root = x;
        while parent[root] != root {
            root = parent[root];
        }
        let mut cur = x;
        while parent[cur] != root {
            let next = parent[cur];
            parent[cur] = root;
            cur = next;
        }
        root
    }
    for e in g.edges() {
        if !gone[e.u] && !gone[e.v] {
            let (a, b) = (find(&mut parent, e.u), find(&mut parent, e.v));
            parent[a] = b;
        }
    }
    let mut size = vec![0usize; n + 1];
    for v in (1..=n).filter(|&v| !gone[v]) {
        let r = find(&mut parent, v);
        size[r] += 1;
    }
    size.iter().filter(|&&s| s % 2 == 1).count()
}

/// First Tutte set by size, then lexicographically, or `None` when the
/// graph has a perfect matching.
pub fn brute_tutte_set(g: &BicoloredGraph) -> Result<Option<Vec<Vertex>>> {
    guard_vertices(g)?;
    let active: Vec<Vertex> = g.vertices().collect();
    for size in 0..=active.len() {
        for s in active.iter().copied().combinations(size) {
            if odd_components_without(g, &s) > s.len() {
                return Ok(Some(s));
            }
        }
    }
    Ok(None)
}
