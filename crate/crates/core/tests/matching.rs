mod common;

use pmvc_core::generate::{self, MutationMode};
use pmvc_core::matching::{self, Decision};
use pmvc_core::{oracle, BicoloredGraph, LegalColoringSpec, BLUE, RED};
use proptest::prelude::*;
use rand::Rng;

#[test]
fn blossom_matches_brute_force_sizes() {
    let mut r = common::rng(7);
    for _ in 0..500 {
        let n = r.random_range(2..=9);
        let m = r.random_range(0..=2 * n);
        let g = BicoloredGraph::uncolored(
            n,
            generate::random_bicolored(n, 1, m, &mut r)
                .edges()
                .iter()
                .map(|e| (e.u, e.v)),
        )
        .unwrap();
        let mm = matching::max_matching(&g);
        assert!(mm.is_valid_for(&g));
        assert_eq!(mm.len(), oracle::brute_max_matching_size(&g).unwrap(), "{g:?}");
        assert_eq!(matching::has_perfect_matching(&g), oracle::brute_pm(&g).unwrap());
    }
}

#[test]
fn enum_blossom_matches_the_oracle_on_the_corpus() {
    for (i, (name, g)) in common::fixture_graphs().into_iter().enumerate() {
        for spec in common::specs_for(&g, i as u64) {
            let want = oracle::brute_forall_pmvc(&g, &spec).unwrap();
            for seed in [None, Some(i as u64)] {
                let got = matching::enum_blossom(&g, &spec, seed).unwrap();
                assert_eq!(got.is_satisfied(), want.is_satisfied(), "{name}/{spec}");
                if let Decision::Violated(c) = got {
                    assert!(spec.contains(&c));
                    assert!(!oracle::brute_pm_with_coloring(&g, &c).unwrap());
                }
            }
        }
    }
}

#[test]
fn dicke_graphs_satisfy_their_level_and_have_the_right_size() {
    for n in (2..=8).step_by(2) {
        for k in 1..=n / 2 {
            let g = generate::dicke_graph(n, k).unwrap();
            let spec = LegalColoringSpec::dicke(n, k).unwrap();
            assert!(
                matching::enum_blossom(&g, &spec, None).unwrap().is_satisfied(),
                "({n},{k})"
            );
            assert_eq!(generate::required_bicolored_edges(&g, k).len(), k * (n - k));
        }
    }
}

#[test]
fn each_required_edge_is_required() {
    for (n, k) in [(4, 1), (4, 2), (6, 1), (6, 2), (6, 3)] {
        let g = generate::dicke_graph(n, k).unwrap();
        let spec = LegalColoringSpec::dicke(n, k).unwrap();
        for idx in generate::required_bicolored_edges(&g, k) {
            let broken = g.without_edge(idx);
            assert!(
                !oracle::brute_forall_pmvc(&broken, &spec).unwrap().is_satisfied(),
                "({n},{k}) edge {idx}"
            );
        }
    }
}

/// The reversed orientation (red `V1` endpoint, blue `V2` endpoint) is only
/// required in the balanced case.
#[test]
fn reversed_orientation_matters_only_when_balanced() {
    for (n, k) in [(4, 1), (4, 2), (6, 1), (6, 2), (6, 3)] {
        let g = generate::dicke_graph(n, k).unwrap();
        let spec = LegalColoringSpec::dicke(n, k).unwrap();
        let reversed: Vec<usize> = g
            .edges()
            .iter()
            .enumerate()
            .filter(|(_, e)| e.u <= k && e.v > k && e.cu == RED && e.cv == BLUE)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(reversed.len(), k * (n - k));
        for idx in reversed {
            let violated = !oracle::brute_forall_pmvc(&g.without_edge(idx), &spec)
                .unwrap()
                .is_satisfied();
            assert_eq!(violated, 2 * k == n, "({n},{k}) edge {idx}");
        }
    }
}

#[test]
fn mutation_is_deterministic_and_sized() {
    let g = generate::dicke_graph(6, 2).unwrap();
    let blue = g.edges().iter().filter(|e| e.cu == BLUE && e.cv == BLUE).count();
    for seed in 0..20 {
        let a = generate::mutate(&g, MutationMode::RemoveBlueFraction(0.4), seed).unwrap();
        let b = generate::mutate(&g, MutationMode::RemoveBlueFraction(0.4), seed).unwrap();
        assert_eq!(a, b);
        assert_eq!(g.edge_count() - a.edge_count(), (0.4 * blue as f64).ceil() as usize);
        let c = generate::mutate(&g, MutationMode::RemoveBicolored(2), seed).unwrap();
        assert_eq!(g.edge_count() - c.edge_count(), 2);
    }
    assert!(generate::mutate(&g, MutationMode::RemoveBicolored(1000), 0).is_err());
}

#[test]
fn violating_mutants_really_violate() {
    for (n, k) in [(4, 1), (4, 2), (6, 2), (6, 3)] {
        let spec = LegalColoringSpec::dicke(n, k).unwrap();
        let (g, seed) = generate::violating_mutant(n, k, MutationMode::RemoveBicolored(1), 0, 1000).unwrap();
        assert_eq!(
            g,
            generate::mutate(
                &generate::dicke_graph(n, k).unwrap(),
                MutationMode::RemoveBicolored(1),
                seed
            )
            .unwrap()
        );
        assert!(!oracle::brute_forall_pmvc(&g, &spec).unwrap().is_satisfied());
    }
}

proptest! {
    #[test]
    fn max_matching_is_valid_and_maximum(n in 2usize..=8, m in 0usize..=16, seed in any::<u64>()) {
        let g = generate::random_bicolored(n, 2, m, &mut common::rng(seed));
        let mm = matching::max_matching(&g);
        prop_assert!(mm.is_valid_for(&g));
        prop_assert_eq!(mm.len(), oracle::brute_max_matching_size(&g).unwrap());
    }

    #[test]
    fn tutte_sets_exist_exactly_without_perfect_matchings(n in 2usize..=7, m in 0usize..=12, seed in any::<u64>()) {
        let g = generate::random_bicolored(n, 1, m, &mut common::rng(seed));
        let pm = matching::has_perfect_matching(&g);
        match oracle::brute_tutte_set(&g).unwrap() {
            Some(s) => {
                prop_assert!(!pm);
                prop_assert!(oracle::odd_components_without(&g, &s) > s.len());
            }
            None => prop_assert!(pm),
        }
    }
}
