//! Benchmark runner: a manifest of (graph, spec, method, solver) cells run
//! on a worker pool, written out as JSON lines plus CSV summaries.

use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::check::{self, Backend, CheckOptions, Method, Verdict};
use crate::coloring::LegalColoringSpec;
use crate::encode::{self, verify_witness};
use crate::error::{Error, Result};
use crate::files::graph_source;
use crate::generate::GraphMeta;
use crate::graph::{BicoloredGraph, Vertex};
use crate::solver::{self, InputFormat, SolveOutcome, SolverRegistry, Status, UnknownReason};

/// Symmetric set choice for a cell.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GsChoice {
    /// `"auto"`: the largest symmetric set recorded in the graph sidecar.
    Named(String),
    List(Vec<Vertex>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub id: String,
    /// A file path (relative to the manifest) or a generator source such as
    /// `dicke:8,4`.
    pub graph: String,
    /// Spec text (`dicke:4`, `ghz`, `w`); defaults to the sidecar's.
    #[serde(default)]
    pub spec: Option<String>,
    /// A check method, or `exactone-cnf`, `exactone-pb`, `tutte-uncolored`
    /// for plain perfect-matching existence.
    pub method: String,
    #[serde(default = "internal")]
    pub solver: String,
    #[serde(default)]
    pub opt: bool,
    #[serde(default)]
    pub gs: Option<GsChoice>,
    #[serde(default)]
    pub timeout_secs: Option<f64>,
}

fn internal() -> String {
    "internal".into()
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    #[serde(default)]
    pub workers: Option<usize>,
    #[serde(default)]
    pub timeout_secs: Option<f64>,
    #[serde(default, rename = "cell")]
    pub cells: Vec<Cell>,
}

impl Manifest {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::parse(0, format!("bad manifest: {e}")))
    }

    /// Desk-scale versions of the three experiment families.
    pub fn preset(name: &str) -> Result<Self> {
        let mut cells = Vec::new();
        let mut push = |id: String, graph: String, method: &str, opt: bool, gs: bool, solver: &str| {
            cells.push(Cell {
                id,
                graph,
                spec: None,
                method: method.into(),
                solver: solver.into(),
                opt,
                gs: gs.then(|| GsChoice::Named("auto".into())),
                timeout_secs: None,
            })
        };
        match name {
            "exp1" => {
                for n in (6..=14).step_by(2) {
                    let g = format!("kbip:{},{n}", n - 2);
                    for solver in ["internal", "clasp"] {
                        push(format!("kbip-{n}"), g.clone(), "exactone-cnf", false, false, solver);
                        push(format!("kbip-{n}"), g.clone(), "tutte-uncolored", true, true, solver);
                    }
                    push(format!("kbip-{n}"), g.clone(), "exactone-pb", false, false, "clasp-opb");
                }
            }
            "exp2" => {
                for n in [6, 8, 10] {
                    let g = format!("dicke:{n},{}", n / 2);
                    let id = format!("dicke-{n}-{}", n / 2);
                    push(id.clone(), g.clone(), "enum-blossom", false, false, "internal");
                    for solver in ["internal", "clasp"] {
                        push(id.clone(), g.clone(), "tutte", true, false, solver);
                        push(id.clone(), g.clone(), "tutte", true, true, solver);
                    }
                    push(id.clone(), g.clone(), "tutte-pbxor", true, true, "clasp-opb");
                    push(id.clone(), g.clone(), "tutte-asp", true, true, "clingo");
                    push(id.clone(), g.clone(), "qbf", false, false, "pyqbf");
                }
            }
            "exp3" => {
                for (i, (n, k, mode)) in experiment3_mutants().into_iter().enumerate() {
                    let g = format!("mutant:{n},{k},{mode},{i}");
                    let id = format!("mutant-{n}-{k}-{i}");
                    push(id.clone(), g.clone(), "enum-blossom", false, false, "internal");
                    push(id.clone(), g.clone(), "tutte", true, false, "internal");
                    push(id.clone(), g.clone(), "tutte", true, true, "clasp");
                }
            }
            _ => {
                return Err(Error::InvalidParams(format!(
                    "unknown preset {name:?}; expected exp1, exp2 or exp3"
                )))
            }
        }
        Ok(Manifest {
            workers: None,
            timeout_secs: Some(60.0),
            cells,
        })
    }
}

/// The 40 desk-scale refutation instances: `n` cycles through 8, 10, 12,
/// `k` through 10-40% of `n` (at least 1), alternating the two mutation
/// modes. Instance `i` uses seed `i` as its starting seed.
pub fn experiment3_mutants() -> Vec<(usize, usize, String)> {
    (0..40)
        .map(|i| {
            let n = [8, 10, 12][i % 3];
            let frac = [0.1, 0.2, 0.3, 0.4][(i / 3) % 4];
            let k = ((frac * n as f64).round() as usize).max(1);
            let mode = if i % 2 == 0 { "blue:0.4" } else { "bicolored:2" };
            (n, k, mode.to_string())
        })
        .collect()
}

/// One result line.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub id: String,
    pub method: String,
    /// The configured solver.
    pub solver: String,
    /// The engine that answered, e.g. `internal-cdcl`.
    pub engine: Option<String>,
    pub opt: bool,
    pub gs: bool,
    pub status: String,
    /// FORALL-PMVC verdict; absent for plain matching cells.
    pub verdict: Option<String>,
    pub time: f64,
    pub n: Option<usize>,
    pub edges: Option<usize>,
    pub message: Option<String>,
}

impl Record {
    pub fn solved(&self) -> bool {
        !self.status.starts_with("UNKNOWN") && self.verdict.as_deref() != Some("UNKNOWN")
    }
}

/// Resolves the `gs` choice against the graph sidecar.
pub fn resolve_gs(choice: Option<&GsChoice>, meta: Option<&GraphMeta>) -> Result<Option<Vec<Vertex>>> {
    match choice {
        None => Ok(None),
        Some(GsChoice::List(u)) => Ok(Some(u.clone())),
        Some(GsChoice::Named(s)) if s == "auto" => Ok(meta
            .and_then(|m| m.symmetric_sets.iter().filter(|s| s.len() >= 2).max_by_key(|s| s.len()))
            .cloned()),
        Some(GsChoice::Named(s)) => Err(Error::InvalidParams(format!("bad gs value {s:?}"))),
    }
}

/// Spec from text if given, else the sidecar's.
pub fn resolve_spec(text: Option<&str>, g: &BicoloredGraph, meta: Option<&GraphMeta>) -> Result<LegalColoringSpec> {
    match (text, meta.and_then(|m| m.legal.clone())) {
        (Some(t), _) => LegalColoringSpec::parse(t, g.n(), g.d()),
        (None, Some(spec)) => Ok(spec),
        (None, None) => Err(Error::InvalidSpec("no spec given and no sidecar records one".into())),
    }
}

struct Runner<'a> {
    base: &'a Path,
    registry: &'a SolverRegistry,
    timeout: Option<Duration>,
}

impl Runner<'_> {
    fn backend(&self, solver: &str) -> std::result::Result<Backend, String> {
        if solver == "internal" {
            return Ok(Backend::Internal);
        }
        match self.registry.get(solver) {
            None => Err(format!("no solver profile named {solver:?}")),
            Some(p) if !p.is_available() => Err(format!("solver {solver:?} is not installed")),
            Some(p) => Ok(Backend::External(p.clone())),
        }
    }

    fn run(&self, cell: &Cell) -> Record {
        let start = Instant::now();
        let mut rec = Record {
            id: cell.id.clone(),
            method: cell.method.clone(),
            solver: cell.solver.clone(),
            engine: None,
            opt: cell.opt,
            gs: cell.gs.is_some(),
            status: String::new(),
            verdict: None,
            time: 0.0,
            n: None,
            edges: None,
            message: None,
        };
        let fail = |mut rec: Record, status: &str, msg: String| {
            rec.status = status.into();
            rec.message = Some(msg);
            rec.time = start.elapsed().as_secs_f64();
            rec
        };
        let backend = match self.backend(&cell.solver) {
            Ok(b) => b,
            Err(msg) => return fail(rec, "UNKNOWN(skipped)", msg),
        };
        let (g, meta) = match graph_source(&cell.graph, self.base) {
            Ok(x) => x,
            Err(e) => return fail(rec, "UNKNOWN(error)", e.to_string()),
        };
        rec.n = Some(g.n());
        rec.edges = Some(g.edge_count());
        let timeout = cell.timeout_secs.map(Duration::from_secs_f64).or(self.timeout);
        let result = match cell.method.as_str() {
            "exactone-cnf" | "exactone-pb" | "tutte-uncolored" => self
                .matching_cell(cell, &g, meta.as_ref(), &backend, timeout)
                .map(|out| {
                    rec.engine = Some(out.solver.clone());
                    rec.status = out.status.to_string();
                    rec.message = out.message.clone();
                }),
            m => m.parse::<Method>().and_then(|method| {
                let spec = resolve_spec(cell.spec.as_deref(), &g, meta.as_ref())?;
                let mut opts = CheckOptions::new(method);
                opts.opt = cell.opt;
                opts.gs = resolve_gs(cell.gs.as_ref(), meta.as_ref())?;
                opts.backend = backend.clone();
                opts.timeout = timeout;
                opts.seed = Some(0);
                let report = check::check(&g, &spec, &opts)?;
                rec.engine = Some(report.solver.clone());
                rec.status = report.status.map(|s| s.to_string()).unwrap_or_else(|| "DECIDED".into());
                if let Verdict::Unknown { reason } = &report.verdict {
                    rec.message = Some(reason.clone());
                }
                rec.verdict = Some(report.verdict.label().into());
                Ok(())
            }),
        };
        if let Err(e) = result {
            return fail(rec, "UNKNOWN(error)", e.to_string());
        }
        rec.time = start.elapsed().as_secs_f64();
        rec
    }

    fn matching_cell(
        &self,
        cell: &Cell,
        g: &BicoloredGraph,
        meta: Option<&GraphMeta>,
        backend: &Backend,
        timeout: Option<Duration>,
    ) -> Result<SolveOutcome> {
        let solve_cnf = |f: &crate::cnf::CnfFormula| match backend {
            Backend::Internal => solver::solve_internal_with_timeout(f, timeout),
            Backend::External(p) => check::solve_text(p, &f.to_dimacs(), InputFormat::Cnf, timeout),
        };
        Ok(match cell.method.as_str() {
            "exactone-cnf" => solve_cnf(&encode::build_exactone_cnf(g)?.0),
            "exactone-pb" => {
                let (f, _) = encode::build_exactone_pb(g)?;
                match backend {
                    Backend::Internal => solver::solve_internal_with_timeout(&f.to_cnf()?, timeout),
                    Backend::External(p) => check::solve_text(p, &f.to_opb()?, InputFormat::Opb, timeout),
                }
            }
            _ => {
                let spec = LegalColoringSpec::ghz(g.n(), 1)?;
                let opts = encode::TutteOptions::new(spec.clone())
                    .with_opt(cell.opt)
                    .with_gs(resolve_gs(cell.gs.as_ref(), meta)?);
                let (f, vars) = encode::build_tutte(g, &opts)?;
                let mut out = solve_cnf(&f);
                if let (Status::Sat, Some(m)) = (&out.status, out.assignment()) {
                    let ok = encode::decode_witness(m, &vars).is_ok_and(|w| verify_witness(g, &spec, &w));
                    if !ok {
                        out.status = Status::Unknown(UnknownReason::Error("witness failed verification".into()));
                        out.message = Some("witness failed verification".into());
                    }
                }
                out
            }
        })
    }
}

/// Runs every cell; results come back in manifest order.
pub fn run_manifest(
    manifest: &Manifest,
    base: &Path,
    registry: &SolverRegistry,
    workers: Option<usize>,
) -> Vec<Record> {
    let runner = Runner {
        base,
        registry,
        timeout: manifest.timeout_secs.map(Duration::from_secs_f64),
    };
    let workers = workers.or(manifest.workers).unwrap_or(1).max(1);
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Record>>> = Mutex::new(vec![None; manifest.cells.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers.min(manifest.cells.len().max(1)) {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(cell) = manifest.cells.get(i) else { break };
                let rec = runner.run(cell);
                log::info!(
                    "{} {} {} -> {} ({:.3}s)",
                    rec.id,
                    rec.method,
                    rec.solver,
                    rec.status,
                    rec.time
                );
                results.lock().expect("no worker panics while holding the lock")[i] = Some(rec);
            });
        }
    });
    results
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|r| r.expect("every cell ran"))
        .collect()
}

/// Writes `results.jsonl`, `summary.csv` and `cactus.csv` into `out`.
///
/// The cactus file has one row per solved cell of each method/solver
/// configuration: `rank`-th fastest solve took `time` seconds.
pub fn write_outputs(records: &[Record], out: &Path) -> Result<()> {
    std::fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let jsonl: String = records
        .iter()
        .map(|r| serde_json::to_string(r).map(|s| s + "\n"))
        .collect::<std::result::Result<_, _>>()?;
    let path = out.join("results.jsonl");
    std::fs::write(&path, jsonl).map_err(|e| Error::io(&path, e))?;

    let path = out.join("summary.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record([
        "id", "method", "solver", "engine", "opt", "gs", "status", "verdict", "time", "n", "edges",
    ])
    .map_err(|e| csv_error(&path, e))?;
    for r in records {
        let row = [
            r.id.clone(),
            r.method.clone(),
            r.solver.clone(),
            r.engine.clone().unwrap_or_default(),
            r.opt.to_string(),
            r.gs.to_string(),
            r.status.clone(),
            r.verdict.clone().unwrap_or_default(),
            format!("{:.6}", r.time),
            r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.edges.map(|n| n.to_string()).unwrap_or_default(),
        ];
        w.write_record(&row).map_err(|e| csv_error(&path, e))?;
    }
    w.flush().map_err(|e| Error::io(&path, e))?;

    let path = out.join("cactus.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
    w.write_record(["config", "rank", "time"])
        .map_err(|e| csv_error(&path, e))?;
    let mut configs: Vec<String> = records.iter().map(config_name).collect();
    configs.sort();
    configs.dedup();
    for config in configs {
        let mut times: Vec<f64> = records
            .iter()
            .filter(|r| r.solved() && config_name(r) == config)
            .map(|r| r.time)
            .collect();
        times.sort_by(f64::total_cmp);
        for (rank, t) in times.iter().enumerate() {
            w.write_record([config.clone(), (rank + 1).to_string(), format!("{t:.6}")])
                .map_err(|e| csv_error(&path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(&path, e))?;
    Ok(())
}

fn config_name(r: &Record) -> String {
    let mut name = format!("{}/{}", r.method, r.solver);
    if r.opt {
        name.push_str("+opt");
    }
    if r.gs {
        name.push_str("+gs");
    }
    name
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    Error::io(path, std::io::Error::other(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_manifest_gives_empty_outputs() {
        let dir = tempfile::tempdir().unwrap();
        let m = Manifest::from_toml("").unwrap();
        let recs = run_manifest(&m, dir.path(), &SolverRegistry::defaults(), Some(4));
        assert!(recs.is_empty());
        write_outputs(&recs, dir.path()).unwrap();
        let summary = std::fs::read_to_string(dir.path().join("summary.csv")).unwrap();
        assert_eq!(summary.lines().count(), 1);
    }

    #[test]
    fn cells_run_and_missing_solvers_skip() {
        let m = Manifest::from_toml(
            r#"
            timeout_secs = 30
            [[cell]]
            id = "d6"
            graph = "dicke:6,3"
            method = "tutte"
            opt = true
            gs = "auto"

            [[cell]]
            id = "d6"
            graph = "dicke:6,3"
            method = "enum-blossom"

            [[cell]]
            id = "k46"
            graph = "kbip:4,6"
            method = "exactone-cnf"

            [[cell]]
            id = "k46"
            graph = "kbip:4,6"
            method = "tutte"
            solver = "no-such-solver"
            "#,
        )
        .unwrap();
        let dir = tempfile::tempdir().unwrap();
        let recs = run_manifest(&m, dir.path(), &SolverRegistry::defaults(), Some(2));
        assert_eq!(recs[0].verdict.as_deref(), Some("SATISFIES"));
        assert_eq!(recs[0].status, "UNSAT");
        assert_eq!(recs[1].verdict.as_deref(), Some("SATISFIES"));
        assert_eq!(recs[2].status, "UNSAT");
        assert_eq!(recs[3].status, "UNKNOWN(skipped)");
        write_outputs(&recs, dir.path()).unwrap();
        let cactus = std::fs::read_to_string(dir.path().join("cactus.csv")).unwrap();
        assert!(cactus.contains("tutte/internal+opt+gs,1,"));
    }

    #[test]
    fn presets_exist() {
        for p in ["exp1", "exp2", "exp3"] {
            assert!(!Manifest::preset(p).unwrap().cells.is_empty());
        }
        assert!(Manifest::preset("exp9").is_err());
        assert_eq!(experiment3_mutants().len(), 40);
    }
}
