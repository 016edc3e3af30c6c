//! Fixture corpus shared by the integration suites.
#![allow(dead_code)]

use itertools::Itertools;
use pmvc_core::generate::{self, MutationMode};
use pmvc_core::{BicoloredGraph, Edge, LegalColoringSpec, Vertex, VertexColoring};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random coloring over `1..=d`.
pub fn random_coloring<R: Rng>(n: usize, d: usize, rng: &mut R) -> VertexColoring {
    VertexColoring::new((0..n).map(|_| rng.random_range(1..=d)).collect())
}

/// A graph that has a perfect matching realising each coloring in `cs`,
/// plus `noise` random edges.
pub fn planted<R: Rng>(n: usize, d: usize, cs: &[VertexColoring], noise: usize, rng: &mut R) -> BicoloredGraph {
    let mut edges = Vec::new();
    for c in cs {
        let mut order: Vec<Vertex> = (1..=n).collect();
        order.shuffle(rng);
        for pair in order.chunks(2) {
            edges.push(Edge::new(pair[0], c.color(pair[0]), pair[1], c.color(pair[1])));
        }
    }
    let extra = generate::random_bicolored(n, d, noise, rng);
    edges.extend_from_slice(extra.edges());
    BicoloredGraph::new(n, d, edges).expect("planted edges are in range")
}

/// Graphs with `n <= 6` and `d <= 2`: named graphs, Dicke graphs and their
/// mutants, random and planted multigraphs.
pub fn fixture_graphs() -> Vec<(String, BicoloredGraph)> {
    let mut out: Vec<(String, BicoloredGraph)> = vec![
        ("cycle4".into(), generate::cycle(4)),
        ("cycle5".into(), generate::cycle(5)),
        ("cycle6".into(), generate::cycle(6)),
        ("k4".into(), generate::complete(4)),
        ("k5".into(), generate::complete(5)),
        ("k6".into(), generate::complete(6)),
        ("kbip24".into(), generate::complete_bipartite(2, 4).unwrap()),
        ("kbip33".into(), generate::complete_bipartite(3, 3).unwrap()),
        ("kbip15".into(), generate::complete_bipartite(1, 5).unwrap()),
        ("ghz4".into(), generate::ghz_cycle(4).unwrap()),
        ("ghz6".into(), generate::ghz_cycle(6).unwrap()),
    ];
    let dicke = [(2, 1), (4, 1), (4, 2), (6, 1), (6, 2), (6, 3)];
    for &(n, k) in &dicke {
        out.push((format!("dicke{n}-{k}"), generate::dicke_graph(n, k).unwrap()));
    }
    for &(n, k) in &dicke[1..] {
        let base = generate::dicke_graph(n, k).unwrap();
        for mode in [
            MutationMode::RemoveBlueFraction(0.4),
            MutationMode::RemoveBicolored(1),
            MutationMode::RemoveBicolored(2),
        ] {
            for seed in 0..6 {
                if let Ok(g) = generate::mutate(&base, mode, seed) {
                    out.push((format!("mutant{n}-{k}-{mode:?}-{seed}"), g));
                }
            }
        }
    }
    let mut r = rng(2024);
    for i in 0..70 {
        let n = [2, 3, 4, 4, 5, 6, 6][i % 7];
        let d = 1 + i % 2;
        let m = r.random_range(n..=3 * n);
        out.push((format!("random{i}"), generate::random_bicolored(n, d, m, &mut r)));
    }
    for i in 0..50 {
        let n = [2, 4, 6, 6][i % 4];
        let d = 1 + (i / 4) % 2;
        let cs: Vec<VertexColoring> = (0..r.random_range(1..=3))
            .map(|_| random_coloring(n, d, &mut r))
            .collect();
        let noise = r.random_range(0..=n);
        out.push((format!("planted{i}"), planted(n, d, &cs, noise, &mut r)));
    }
    out
}

/// Specs fitting `g` with `|C| <= 70`: GHZ, W, one Dicke level and one
/// explicit list (drawn with `seed`).
pub fn specs_for(g: &BicoloredGraph, seed: u64) -> Vec<LegalColoringSpec> {
    let (n, d) = (g.n(), g.d());
    let mut r = rng(seed);
    let mut specs = vec![LegalColoringSpec::ghz(n, d).unwrap()];
    if d == 2 {
        specs.push(LegalColoringSpec::w(n));
        specs.push(LegalColoringSpec::dicke(n, r.random_range(0..=n)).unwrap());
    }
    let mut list: Vec<VertexColoring> = (0..r.random_range(1..=4))
        .map(|_| random_coloring(n, d, &mut r))
        .collect();
    list.sort_by(|a, b| a.colors().cmp(b.colors()));
    list.dedup();
    specs.push(LegalColoringSpec::explicit(n, list).unwrap());
    specs.retain(|s| s.check_graph(g).is_ok() && s.cardinality() <= 70);
    specs
}

/// Whether swapping any two vertices of `set` maps the edge multiset onto
/// itself. Checked on the edge lists directly.
pub fn swap_invariant(g: &BicoloredGraph, set: &[Vertex]) -> bool {
    let canon = |edges: Vec<(Vertex, usize, Vertex, usize)>| {
        let mut e: Vec<_> = edges
            .into_iter()
            .map(|(u, cu, v, cv)| {
                if (u, cu) <= (v, cv) {
                    (u, cu, v, cv)
                } else {
                    (v, cv, u, cu)
                }
            })
            .collect();
        e.sort_unstable();
        e
    };
    let original = canon(g.edges().iter().map(|e| (e.u, e.cu, e.v, e.cv)).collect());
    set.iter().tuple_combinations().all(|(&a, &b)| {
        let sw = |x: Vertex| {
            if x == a {
                b
            } else if x == b {
                a
            } else {
                x
            }
        };
        canon(g.edges().iter().map(|e| (sw(e.u), e.cu, sw(e.v), e.cv)).collect()) == original
    })
}

/// Whether swapping any two vertices of `set` maps `C` onto itself.
pub fn spec_swap_invariant(spec: &LegalColoringSpec, set: &[Vertex]) -> bool {
    let all: Vec<VertexColoring> = spec.colorings().collect();
    set.iter().tuple_combinations().all(|(&a, &b)| {
        all.iter().all(|c| {
            let mut s = c.colors().to_vec();
            s.swap(a - 1, b - 1);
            spec.contains(&VertexColoring::new(s))
        })
    })
}

/// Largest vertex set (at least two vertices) that is swap-invariant for
/// both `g` and `spec`, found by exhaustive search.
pub fn largest_symmetric_set(g: &BicoloredGraph, spec: &LegalColoringSpec) -> Option<Vec<Vertex>> {
    let n = g.n();
    (2..=n).rev().find_map(|size| {
        (1..=n)
            .combinations(size)
            .find(|set| swap_invariant(g, set) && spec_swap_invariant(spec, set))
    })
}
