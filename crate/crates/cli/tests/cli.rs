use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn pmvc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pmvc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.display().to_string()
}

#[test]
fn generated_dicke_graph_has_every_edge() {
    let o = pmvc(&["generate", "dicke-graph", "-n", "6", "-k", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("6 2"));
    assert_eq!(lines.filter(|l| !l.trim().is_empty()).count(), 22);
}

#[test]
fn generate_writes_a_sidecar_next_to_the_output() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.graph");
    let o = pmvc(&[
        "generate",
        "-o",
        out.to_str().unwrap(),
        "dicke-graph",
        "-n",
        "4",
        "-k",
        "2",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(out.exists());
    let sidecars: Vec<_> = fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.file_name().to_string_lossy().ends_with(".json"))
        .collect();
    assert_eq!(sidecars.len(), 1);
    // The sidecar's spec is picked up by check.
    let o = pmvc(&["check", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}{}", stdout(&o), stderr(&o));
}

#[test]
fn encode_reports_named_variable_counts() {
    let dir = tempfile::tempdir().unwrap();
    let edges = "6 2\n1 1 2 1\n2 2 3 2\n3 1 4 1\n4 2 5 2\n5 1 6 1\n6 2 1 2\n1 1 4 2\n2 1 5 1\n3 2 6 1\n1 2 3 1\n";
    let g = write(dir.path(), "g.graph", edges);
    for (opt, want) in [(false, 70), (true, 55)] {
        let out = dir.path().join(format!("f{opt}.cnf"));
        let mut args = vec![
            "encode",
            "-e",
            "tutte-cnf",
            "-s",
            "ghz",
            "-o",
            out.to_str().unwrap(),
            &g,
        ];
        if opt {
            args.push("--opt");
        }
        let o = pmvc(&args);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains(&format!("named vars: {want}")), "{}", stdout(&o));
        assert!(fs::read_to_string(&out)
            .unwrap()
            .lines()
            .any(|l| l.starts_with("p cnf ")));
    }
}

#[test]
fn qbf_rejects_explicit_specs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write(
        dir.path(),
        "s.json",
        r#"{"kind":"explicit","n":4,"colorings":[[1,2,1,2]]}"#,
    );
    let o = pmvc(&["check", "-m", "qbf", "-s", &spec, "dicke:4,2"]);
    assert_eq!(o.status.code(), Some(2), "{}{}", stdout(&o), stderr(&o));
    assert!(stderr(&o).contains("QBF"), "{}", stderr(&o));
    let o = pmvc(&["check", "-s", &spec, "dicke:4,2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn check_exit_codes_follow_the_verdict() {
    let o = pmvc(&["check", "--opt", "dicke:6,2"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).starts_with("SATISFIES"));
    let o = pmvc(&["check", "--opt", "mutant:6,2,bicolored:1,0"]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert!(stdout(&o).contains("coloring:"));
    let o = pmvc(&["check", "-m", "enum-blossom", "--json", "mutant:6,2,bicolored:1,0"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "VIOLATED");
}

#[test]
fn empty_manifest_gives_a_header_only_summary() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(dir.path(), "empty.toml", "");
    let out = dir.path().join("out");
    let o = pmvc(&["bench", &m, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let summary = fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 1);
}

#[test]
fn bench_runs_a_small_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(
        dir.path(),
        "m.toml",
        "[[cell]]\nid = \"a\"\ngraph = \"dicke:4,2\"\nmethod = \"tutte\"\nopt = true\n\n\
         [[cell]]\nid = \"b\"\ngraph = \"dicke:4,2\"\nmethod = \"enum-blossom\"\n",
    );
    let out = dir.path().join("out");
    let o = pmvc(&["bench", &m, "-o", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", stderr(&o));
    let results = fs::read_to_string(out.join("results.jsonl")).unwrap();
    assert_eq!(results.lines().count(), 2);
    for line in results.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["verdict"], "SATISFIES", "{line}");
    }
    assert!(out.join("cactus.csv").exists());
}

#[test]
fn dimacs_solve_prints_competition_output() {
    let dir = tempfile::tempdir().unwrap();
    let sat = write(dir.path(), "sat.cnf", "p cnf 2 2\n1 2 0\n-1 0\n");
    let o = pmvc(&["dimacs-solve", &sat]);
    assert_eq!(o.status.code(), Some(10));
    let text = stdout(&o);
    assert!(text.lines().any(|l| l == "s SATISFIABLE"));
    assert!(text
        .lines()
        .any(|l| l.starts_with("v ") && l.contains("-1") && l.contains(" 2")));
    let unsat = write(dir.path(), "unsat.cnf", "p cnf 1 2\n1 0\n-1 0\n");
    let o = pmvc(&["dimacs-solve", &unsat]);
    assert_eq!(o.status.code(), Some(20));
    assert!(stdout(&o).lines().any(|l| l == "s UNSATISFIABLE"));
}

#[test]
fn solvers_lists_builtin_profiles() {
    let o = pmvc(&["solvers"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for name in ["clasp", "clingo"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{text}");
    }
}

#[test]
fn missing_graph_file_is_reported() {
    let bad = pmvc(&["check", "no/such/file.graph"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("error"));
}

#[test]
fn oracle_subcommand_answers() {
    let o = pmvc(&["oracle", "forall", "dicke:4,2"]);
    assert_eq!(stdout(&o).trim(), "SATISFIES");
    let o = pmvc(&["oracle", "forall", "mutant:4,2,bicolored:1,0"]);
    assert!(stdout(&o).starts_with("VIOLATED"), "{}", stdout(&o));
    let o = pmvc(&["oracle", "pm", "kbip:1,3"]);
    assert_eq!(stdout(&o).trim(), "false");
    let o = pmvc(&["oracle", "tutte-set", "kbip:1,3"]);
    assert_ne!(stdout(&o).trim(), "none");
}
