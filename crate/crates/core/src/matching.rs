//! Maximum-cardinality matching on general graphs (Edmonds' blossom
//! algorithm, O(V^3)) and the enumerate-and-match decision procedure.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::coloring::{LegalColoringSpec, VertexColoring, DEFAULT_ENUMERATION_CAP};
use crate::error::Result;
use crate::graph::{BicoloredGraph, Vertex};

/// Outcome of a FORALL-PMVC decision.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Satisfies,
    /// A legal coloring whose induced graph has no perfect matching.
    Violated(VertexColoring),
}

impl Decision {
    pub fn is_satisfied(&self) -> bool {
        matches!(self, Decision::Satisfies)
    }
}

/// A set of vertex-disjoint pairs, each stored as `(u, v)` with `u < v`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Matching {
    pairs: Vec<(Vertex, Vertex)>,
}

impl Matching {
    pub fn pairs(&self) -> &[(Vertex, Vertex)] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    /// Pairs are disjoint and each one is adjacent in `g`.
    pub fn is_valid_for(&self, g: &BicoloredGraph) -> bool {
        let adj = g.adjacency();
        let mut seen = vec![false; g.n() + 1];
        self.pairs.iter().all(|&(u, v)| {
            let fresh = !seen[u] && !seen[v];
            seen[u] = true;
            seen[v] = true;
            fresh && adj[u].binary_search(&v).is_ok()
        })
    }
}

const NONE: usize = usize::MAX;

struct Blossom<'a> {
    adj: &'a [Vec<Vertex>],
    mate: Vec<usize>,
    parent: Vec<usize>,
    base: Vec<usize>,
    used: Vec<bool>,
    in_blossom: Vec<bool>,
    queue: VecDeque<usize>,
}

impl<'a> Blossom<'a> {
    fn new(adj: &'a [Vec<Vertex>]) -> Self {
        let size = adj.len();
        Blossom {
            adj,
            mate: vec![NONE; size],
            parent: vec![NONE; size],
            base: (0..size).collect(),
            used: vec![false; size],
            in_blossom: vec![false; size],
            queue: VecDeque::new(),
        }
    }

    fn lca(&self, mut a: usize, mut b: usize) -> usize {
        let mut on_path = vec![false; self.adj.len()];
        loop {
            a = self.base[a];
            on_path[a] = true;
            if self.mate[a] == NONE {
                break;
            }
            a = self.parent[self.mate[a]];
        }
        loop {
            b = self.base[b];
            if on_path[b] {
                return b;
            }
            b = self.parent[self.mate[b]];
        }
    }

    fn mark_path(&mut self, mut v: usize, b: usize, mut child: usize) {
        while self.base[v] != b {
            self.in_blossom[self.base[v]] = true;
            self.in_blossom[self.base[self.mate[v]]] = true;
            self.parent[v] = child;
            child = self.mate[v];
            v = self.parent[self.mate[v]];
        }
    }

    /// BFS for an augmenting path from `root`; returns its free endpoint.
    fn find_path(&mut self, root: usize) -> Option<usize> {
        let size = self.adj.len();
        self.used.iter_mut().for_each(|u| *u = false);
        self.parent.iter_mut().for_each(|p| *p = NONE);
        for (i, b) in self.base.iter_mut().enumerate() {
            *b = i;
        }
        self.used[root] = true;
        self.queue.clear();
        self.queue.push_back(root);
        while let Some(v) = self.queue.pop_front() {
            for idx in 0..self.adj[v].len() {
                let to = self.adj[v][idx];
                if self.base[v] == self.base[to] || self.mate[v] == to {
                    continue;
                }
                if to == root || (self.mate[to] != NONE && self.parent[self.mate[to]] != NONE) {
                    let cur = self.lca(v, to);
                    self.in_blossom.iter_mut().for_each(|b| *b = false);
                    self.mark_path(v, cur, to);
                    self.mark_path(to, cur, v);
                    for i in 0..size {
                        if self.in_blossom[self.base[i]] {
                            self.base[i] = cur;
                            if !self.used[i] {
                                self.used[i] = true;
                                self.queue.push_back(i);
                            }
                        }
                    }
                } else if self.parent[to] == NONE {
                    self.parent[to] = v;
                    if self.mate[to] == NONE {
                        return Some(to);
                    }
                    let next = self.mate[to];
                    self.used[next] = true;
                    self.queue.push_back(next);
                }
            }
        }
        None
    }

    fn augment(&mut self, mut v: usize) {
        while v != NONE {
            let pv = self.parent[v];
            let ppv = self.mate[pv];
            self.mate[v] = pv;
            self.mate[pv] = v;
            v = ppv;
        }
    }
}

/// Maximum-cardinality matching of the underlying uncolored multigraph.
pub fn max_matching(g: &BicoloredGraph) -> Matching {
    let adj = g.adjacency();
    let mut b = Blossom::new(&adj);
    // Greedy warm start; the augmenting phase makes it maximum.
    for v in g.vertices() {
        if b.mate[v] == NONE {
            if let Some(&w) = adj[v].iter().find(|&&w| b.mate[w] == NONE) {
                b.mate[v] = w;
                b.mate[w] = v;
            }
        }
    }
    for v in g.vertices() {
        if b.mate[v] == NONE {
            if let Some(end) = b.find_path(v) {
                b.augment(end);
            }
        }
    }
    let pairs = (1..=g.n())
        .filter(|&v| b.mate[v] != NONE && v < b.mate[v])
        .map(|v| (v, b.mate[v]))
        .collect();
    Matching { pairs }
}

/// Whether every active vertex is covered by a maximum matching.
pub fn has_perfect_matching(g: &BicoloredGraph) -> bool {
    let active = g.active_count();
    active.is_multiple_of(2) && 2 * max_matching(g).len() == active
}

/// Enumerates `C` (optionally in a seeded shuffled order) and runs the
/// blossom check on each induced graph, stopping at the first failure.
pub fn enum_blossom(g: &BicoloredGraph, spec: &LegalColoringSpec, shuffle_seed: Option<u64>) -> Result<Decision> {
    enum_blossom_capped(g, spec, shuffle_seed, DEFAULT_ENUMERATION_CAP)
}

pub fn enum_blossom_capped(
    g: &BicoloredGraph,
    spec: &LegalColoringSpec,
    shuffle_seed: Option<u64>,
    cap: u128,
) -> Result<Decision> {
    spec.check_graph(g)?;
    let count = spec.cardinality();
    if count > cap {
        return Err(crate::Error::EnumerationCap { count, cap });
    }
    let order: Box<dyn Iterator<Item = VertexColoring>> = match shuffle_seed {
        Some(seed) => Box::new(spec.shuffled_colorings(seed, cap)?.into_iter()),
        None => spec.colorings(),
    };
    let mut checked = 0u64;
    for c in order {
        checked += 1;
        if !has_perfect_matching(&g.induced(&c)) {
            log::debug!("enum-blossom: coloring {c} fails after {checked} checks");
            return Ok(Decision::Violated(c));
        }
    }
    log::debug!("enum-blossom: all {checked} colorings admit a perfect matching");
    Ok(Decision::Satisfies)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate;

    #[test]
    fn cycles_and_triangles() {
        let c6 = generate::cycle(6);
        let m = max_matching(&c6);
        assert_eq!(m.len(), 3);
        assert!(m.is_valid_for(&c6));
        assert!(has_perfect_matching(&c6));
        let k3 = generate::complete(3);
        assert_eq!(max_matching(&k3).len(), 1);
        assert!(!has_perfect_matching(&k3));
    }

    #[test]
    fn petersen_is_perfect() {
        let p = generate::petersen();
        let m = max_matching(&p);
        assert_eq!(m.len(), 5);
        assert!(m.is_valid_for(&p));
    }

    #[test]
    fn single_vertex_and_bipartite() {
        assert!(!has_perfect_matching(&BicoloredGraph::uncolored(1, []).unwrap()));
        assert!(!has_perfect_matching(&generate::complete_bipartite(8, 10).unwrap()));
        assert!(has_perfect_matching(&generate::complete_bipartite(3, 3).unwrap()));
    }

    #[test]
    fn needs_blossom_contraction() {
        // Triangle 1-2-3 with tails 3-4 and 1-5, 2-6: greedy can pick badly.
        let g = BicoloredGraph::uncolored(6, [(1, 2), (2, 3), (1, 3), (3, 4), (1, 5), (2, 6)]).unwrap();
        assert!(has_perfect_matching(&g));
    }

    #[test]
    fn removed_vertices_are_ignored() {
        let g = generate::cycle(6).without_vertices(&[1, 4]);
        // Remaining: paths 2-3 and 5-6.
        assert!(has_perfect_matching(&g));
        let g = generate::cycle(6).without_vertices(&[1]);
        assert!(!has_perfect_matching(&g));
    }

    #[test]
    fn enum_blossom_examples() {
        let dg = generate::dicke_graph(6, 2).unwrap();
        let spec = LegalColoringSpec::dicke(6, 2).unwrap();
        assert_eq!(enum_blossom(&dg, &spec, None).unwrap(), Decision::Satisfies);
        assert_eq!(enum_blossom(&dg, &spec, Some(3)).unwrap(), Decision::Satisfies);

        let cyc = generate::ghz_cycle(6).unwrap();
        let ghz = LegalColoringSpec::ghz(6, 2).unwrap();
        assert_eq!(enum_blossom(&cyc, &ghz, None).unwrap(), Decision::Satisfies);

        let base = generate::dicke_graph(4, 1).unwrap();
        let idx = generate::required_bicolored_edges(&base, 1)[0];
        let broken = base.without_edge(idx);
        let spec = LegalColoringSpec::dicke(4, 1).unwrap();
        match enum_blossom(&broken, &spec, None).unwrap() {
            Decision::Violated(c) => {
                assert!(spec.contains(&c));
                assert!(!has_perfect_matching(&broken.induced(&c)));
            }
            Decision::Satisfies => panic!("removing a required edge must violate"),
        }
    }

    #[test]
    fn enumeration_cap_is_an_error() {
        let g = generate::dicke_graph(30, 15).unwrap();
        let spec = LegalColoringSpec::dicke(30, 15).unwrap();
        assert!(enum_blossom_capped(&g, &spec, None, 1000).is_err());
    }
}
