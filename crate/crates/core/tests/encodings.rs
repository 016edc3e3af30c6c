mod common;

use pmvc_core::check::{self, Backend, CheckOptions, Method, Verdict};
use pmvc_core::cnf::VarMap;
use pmvc_core::encode::{self, PbFormula, TutteOptions};
use pmvc_core::solver::{self, SolverRegistry, Status};
use pmvc_core::{generate, oracle, BicoloredGraph, LegalColoringSpec};
use proptest::prelude::*;

fn oracle_violated(g: &BicoloredGraph, spec: &LegalColoringSpec) -> bool {
    !oracle::brute_forall_pmvc(g, spec).unwrap().is_satisfied()
}

/// Every `step`-th corpus case.
fn sample(step: usize) -> Vec<(String, BicoloredGraph, LegalColoringSpec)> {
    let mut out = Vec::new();
    for (i, (name, g)) in common::fixture_graphs().into_iter().enumerate() {
        for spec in common::specs_for(&g, i as u64) {
            out.push((name.clone(), g.clone(), spec));
        }
    }
    out.into_iter().step_by(step).collect()
}

#[test]
fn tutte_witnesses_verify_on_the_corpus() {
    for (name, g, spec) in sample(1) {
        let mut opts = CheckOptions::new(Method::Tutte);
        opts.opt = true;
        match check::check(&g, &spec, &opts).unwrap().verdict {
            Verdict::Violated { witness: Some(w), .. } => {
                assert!(encode::verify_witness(&g, &spec, &w), "{name}/{spec}");
                let induced = g.induced(&w.coloring);
                assert!(oracle::odd_components_without(&induced, &w.tutte_set) > w.tutte_set.len());
            }
            Verdict::Satisfies => assert!(!oracle_violated(&g, &spec), "{name}/{spec}"),
            other => panic!("{name}/{spec}: {other:?}"),
        }
    }
}

#[test]
fn pbxor_compiled_internally_matches_the_oracle() {
    for (name, g, spec) in sample(2) {
        let (f, _) = encode::emit_pbxor_tutte(&g, &TutteOptions::new(spec.clone()).with_opt(true)).unwrap();
        let sat = solver::solve_internal(&f.to_cnf().unwrap()).status == Status::Sat;
        assert_eq!(sat, oracle_violated(&g, &spec), "{name}/{spec}");
        // The linearised form must keep the same answer.
        let lin = f.xors_as_linear();
        assert!(lin.xors.is_empty());
        let back = PbFormula::parse(&f.to_pbxor()).unwrap();
        assert_eq!(back.to_pbxor(), f.to_pbxor());
    }
}

#[test]
fn qbf_expansion_matches_the_oracle() {
    for (name, g, spec) in sample(3) {
        if matches!(spec, LegalColoringSpec::Explicit { .. }) {
            continue;
        }
        let r = check::check(&g, &spec, &CheckOptions::new(Method::Qbf)).unwrap();
        assert_eq!(
            r.verdict.label() == "VIOLATED",
            oracle_violated(&g, &spec),
            "{name}/{spec}"
        );
        if let Verdict::Violated { coloring: Some(c), .. } = &r.verdict {
            assert!(spec.contains(c));
            assert!(
                !oracle::brute_pm_with_coloring(&g, c).unwrap(),
                "{name}: counterexample has a matching"
            );
        }
    }
}

#[test]
fn asp_programs_validate_and_clingo_agrees() {
    let clingo = SolverRegistry::defaults()
        .get("clingo")
        .cloned()
        .filter(|p| p.is_available());
    if clingo.is_none() {
        eprintln!("skipping clingo runs: clingo is not installed");
    }
    for (i, (name, g, spec)) in sample(1).into_iter().enumerate() {
        let opts = TutteOptions::new(spec.clone()).with_opt(i % 2 == 0);
        encode::validate_asp(&encode::emit_asp_tutte(&g, &opts).unwrap()).unwrap();
        if let Some(p) = clingo.as_ref().filter(|_| i % 8 == 0) {
            let mut c = CheckOptions::new(Method::TutteAsp);
            c.opt = opts.opt;
            c.backend = Backend::External(p.clone());
            let r = check::check(&g, &spec, &c).unwrap();
            assert_eq!(
                r.verdict.label() == "VIOLATED",
                oracle_violated(&g, &spec),
                "{name}/{spec}"
            );
            if let Verdict::Violated { witness, .. } = &r.verdict {
                assert!(encode::verify_witness(&g, &spec, witness.as_ref().unwrap()));
            }
        }
    }
}

#[test]
fn exactone_encodings_match_matching_existence() {
    for (name, g) in common::fixture_graphs() {
        if g.vertices().any(|v| g.edges().iter().all(|e| !e.touches(v))) {
            continue;
        }
        let pm = oracle::brute_pm(&g).unwrap();
        let (cnf, vars) = encode::build_exactone_cnf(&g).unwrap();
        let out = solver::solve_internal(&cnf);
        assert_eq!(out.status == Status::Sat, pm, "{name}");
        if let Some(m) = out.assignment() {
            let matching = encode::decode_matching(m, &vars);
            assert_eq!(matching.len() * 2, g.n(), "{name}");
        }
        let (pb, _) = encode::build_exactone_pb(&g).unwrap();
        assert_eq!(
            solver::solve_internal(&pb.to_cnf().unwrap()).status == Status::Sat,
            pm,
            "{name}"
        );
    }
}

#[test]
fn var_map_sidecar_round_trips() {
    let g = generate::dicke_graph(6, 2).unwrap();
    let (_, vars) = encode::build_tutte(&g, &TutteOptions::new(LegalColoringSpec::dicke(6, 2).unwrap())).unwrap();
    let back = VarMap::from_json(&vars.to_json()).unwrap();
    assert_eq!(back, vars);
}

fn small_graph() -> impl Strategy<Value = BicoloredGraph> {
    (2usize..=6, 1usize..=2, any::<u64>()).prop_flat_map(|(n, d, seed)| {
        (0..=2 * n).prop_map(move |m| generate::random_bicolored(n, d, m, &mut common::rng(seed)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tutte_layers_agree_with_the_oracle(g in small_graph()) {
        let spec = LegalColoringSpec::ghz(g.n(), g.d()).unwrap();
        let want = oracle_violated(&g, &spec);
        for opt in [false, true] {
            let (f, vars) = encode::build_tutte(&g, &TutteOptions::new(spec.clone()).with_opt(opt)).unwrap();
            let out = solver::solve_internal(&f);
            prop_assert_eq!(out.status == Status::Sat, want);
            if let Some(m) = out.assignment() {
                let w = encode::decode_witness(m, &vars).unwrap();
                prop_assert!(encode::verify_witness(&g, &spec, &w));
            }
        }
    }

    #[test]
    fn verdicts_survive_relabeling(g in small_graph(), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        let mut perm: Vec<usize> = (0..=g.n()).collect();
        perm[1..].shuffle(&mut common::rng(seed));
        let h = g.relabeled(&perm);
        let spec = LegalColoringSpec::ghz(g.n(), g.d()).unwrap();
        let mut opts = CheckOptions::new(Method::Tutte);
        opts.opt = true;
        let a = check::check(&g, &spec, &opts).unwrap().verdict;
        let b = check::check(&h, &spec, &opts).unwrap().verdict;
        prop_assert_eq!(a.label(), b.label());
    }

    #[test]
    fn named_variable_formula(g in small_graph()) {
        let (n, m, d) = (g.n(), g.edge_count(), g.d());
        let spec = LegalColoringSpec::ghz(n, d).unwrap();
        let (_, vars) = encode::build_tutte(&g, &TutteOptions::new(spec.clone())).unwrap();
        prop_assert_eq!(vars.named_count(), n * n + m + (d + 2) * n);
        let (pb, pb_vars) = encode::emit_pbxor_tutte(&g, &TutteOptions::new(spec)).unwrap();
        prop_assert_eq!(pb_vars.named_count(), vars.named_count());
        prop_assert!(pb.var_count as usize >= pb_vars.named_count());
    }
}
