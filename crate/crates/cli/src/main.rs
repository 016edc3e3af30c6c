use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pmvc_core::bench::{self, GsChoice, Manifest};
use pmvc_core::check::{self, Backend, CheckOptions, Method, Verdict};
use pmvc_core::cnf::{parse_dimacs, VarMap};
use pmvc_core::encode::{self, PbFormula, TutteOptions};
use pmvc_core::files::{graph_source, write_graph, MUTANT_ATTEMPTS};
use pmvc_core::generate::{self, GraphMeta, MutationMode};
use pmvc_core::solver::{self, InputFormat, SolveOutcome, SolverRegistry, Status};
use pmvc_core::{oracle, BicoloredGraph, LegalColoringSpec, Vertex};

#[derive(Parser)]
#[command(name = "pmvc", version, about = "FORALL-PMVC decision toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a generated graph and its metadata sidecar.
    Generate {
        #[command(subcommand)]
        family: Family,
        /// Output file (`.json` for JSON); stdout if omitted.
        #[arg(short, long, global = true)]
        out: Option<PathBuf>,
    },
    /// Emit a formula for a graph.
    Encode {
        #[command(flatten)]
        input: GraphInput,
        #[arg(short, long, value_enum)]
        encoding: Encoding,
        #[command(flatten)]
        layers: Layers,
        /// Output file; stdout if omitted.
        #[arg(short, long)]
        out: Option<PathBuf>,
    },
    /// Run a solver on a formula file and report its status.
    Solve {
        file: PathBuf,
        /// Profile name, or `internal`.
        #[arg(long, default_value = "internal")]
        solver: String,
        /// Input format; guessed from the extension if omitted.
        #[arg(long, value_enum)]
        format: Option<Format>,
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Decide FORALL-PMVC. Exit status 0 satisfies, 1 violated, 2 unknown.
    Check {
        #[command(flatten)]
        input: GraphInput,
        #[arg(short, long, default_value = "tutte")]
        method: String,
        #[command(flatten)]
        layers: Layers,
        /// Profile name, or `internal`.
        #[arg(long, default_value = "internal")]
        solver: String,
        #[arg(long)]
        timeout: Option<f64>,
        /// Shuffle seed for enum-blossom.
        #[arg(long)]
        seed: Option<u64>,
        /// Print the report as JSON.
        #[arg(long)]
        json: bool,
    },
    /// Run a benchmark manifest.
    Bench {
        /// TOML manifest.
        manifest: Option<PathBuf>,
        /// Built-in manifest: exp1, exp2 or exp3.
        #[arg(long, conflicts_with = "manifest")]
        preset: Option<String>,
        #[arg(short, long)]
        out: PathBuf,
        #[arg(short, long)]
        workers: Option<usize>,
        /// Per-cell timeout overriding the manifest's.
        #[arg(long)]
        timeout: Option<f64>,
    },
    /// Brute-force reference answers for small graphs.
    Oracle {
        #[arg(value_enum)]
        question: OracleQuestion,
        #[command(flatten)]
        input: GraphInput,
    },
    /// Internal solver on a DIMACS file, with competition-style output.
    DimacsSolve { file: PathBuf },
    /// List solver profiles and whether they are installed.
    Solvers,
}

#[derive(Subcommand)]
enum Family {
    /// DickeGraph(n, k).
    DickeGraph {
        #[arg(short)]
        n: usize,
        #[arg(short)]
        k: usize,
    },
    /// Uncolored complete bipartite graph K_{a,b}.
    Kbip {
        #[arg(short)]
        a: usize,
        #[arg(short)]
        b: usize,
    },
    /// A DickeGraph mutant that violates its Dicke condition.
    Mutant {
        /// Base graph, `dicke:N,K`.
        #[arg(long)]
        base: String,
        /// `blue:<fraction>` or `bicolored:<count>`.
        #[arg(long)]
        mode: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = MUTANT_ATTEMPTS)]
        attempts: u64,
    },
    /// The n-cycle doubled into a red and a blue perfect matching pair.
    GhzCycle {
        #[arg(short)]
        n: usize,
    },
    /// Random bicolored multigraph.
    Random {
        #[arg(short)]
        n: usize,
        #[arg(short, default_value_t = 2)]
        d: usize,
        #[arg(short)]
        m: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Args)]
struct GraphInput {
    /// Graph file, or `dicke:N,K`, `kbip:A,B`, `ghz-cycle:N`, `mutant:N,K,MODE,SEED`.
    graph: String,
    /// `ghz[:d]`, `w`, `dicke:k` or a JSON spec file; defaults to the sidecar's.
    #[arg(short, long)]
    spec: Option<String>,
}

#[derive(Args)]
struct Layers {
    #[arg(long)]
    opt: bool,
    /// Symmetric set: `auto` or a comma-separated ordered vertex list.
    #[arg(long)]
    gs: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Encoding {
    TutteCnf,
    TuttePbxor,
    TutteAsp,
    ExactoneCnf,
    ExactonePb,
    Qbf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Cnf,
    Qdimacs,
    Opb,
    Pbxor,
    Lp,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Cnf => InputFormat::Cnf,
            Format::Qdimacs => InputFormat::Qdimacs,
            Format::Opb => InputFormat::Opb,
            Format::Pbxor => InputFormat::Pbxor,
            Format::Lp => InputFormat::Lp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleQuestion {
    /// Does the graph (colors ignored) have a perfect matching?
    Pm,
    /// FORALL-PMVC by enumerating colorings and matchings.
    Forall,
    /// Smallest Tutte set of the uncolored graph.
    TutteSet,
}

fn main() -> ExitCode {
    // Exit quietly when piped into `head` and the like.
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Generate { family, out } => cmd_generate(family, out.as_deref()),
        Command::Encode {
            input,
            encoding,
            layers,
            out,
        } => cmd_encode(&input, encoding, &layers, out.as_deref()),
        Command::Solve {
            file,
            solver,
            format,
            timeout,
        } => cmd_solve(&file, &solver, format, timeout),
        Command::Check {
            input,
            method,
            layers,
            solver,
            timeout,
            seed,
            json,
        } => cmd_check(&input, &method, &layers, &solver, timeout, seed, json),
        Command::Bench {
            manifest,
            preset,
            out,
            workers,
            timeout,
        } => cmd_bench(manifest.as_deref(), preset.as_deref(), &out, workers, timeout),
        Command::Oracle { question, input } => cmd_oracle(question, &input),
        Command::DimacsSolve { file } => cmd_dimacs_solve(&file),
        Command::Solvers => cmd_solvers(),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_generate(family: Family, out: Option<&Path>) -> Result<ExitCode> {
    let (g, meta) = match family {
        Family::DickeGraph { n, k } => (generate::dicke_graph(n, k)?, generate::dicke_meta(n, k)),
        Family::Kbip { a, b } => (
            generate::complete_bipartite(a, b)?,
            generate::complete_bipartite_meta(a, b),
        ),
        Family::Mutant {
            base,
            mode,
            seed,
            attempts,
        } => {
            let (n, k) = base
                .strip_prefix("dicke:")
                .and_then(|s| s.split_once(','))
                .and_then(|(n, k)| Some((n.trim().parse().ok()?, k.trim().parse().ok()?)))
                .ok_or_else(|| anyhow!("--base must look like dicke:N,K"))?;
            let mode = MutationMode::parse(&mode)?;
            let (g, used) = generate::violating_mutant(n, k, mode, seed, attempts)?;
            if used != seed {
                log::info!("seed {seed} kept the condition; seed {used} breaks it");
            }
            let meta = generate::mutant_meta(n, k, mode, used, &g);
            (g, meta)
        }
        Family::GhzCycle { n } => {
            let mut meta = GraphMeta::new("ghz-cycle");
            meta.legal = Some(LegalColoringSpec::ghz(n, 2)?);
            (generate::ghz_cycle(n)?, meta)
        }
        Family::Random { n, d, m, seed } => {
            if n < 2 && m > 0 {
                bail!("edges need at least two vertices");
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (generate::random_bicolored(n, d, m, &mut rng), GraphMeta::new("random"))
        }
    };
    let meta_json = serde_json::to_string_pretty(&meta)?;
    match out {
        Some(path) => {
            write_graph(path, &g, Some(&meta))?;
            println!("{meta_json}");
        }
        None => {
            print!("{}", g.to_text());
            eprintln!("{meta_json}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn load(input: &GraphInput) -> Result<(BicoloredGraph, Option<GraphMeta>)> {
    Ok(graph_source(&input.graph, Path::new("."))?)
}

fn spec_for(input: &GraphInput, g: &BicoloredGraph, meta: Option<&GraphMeta>) -> Result<LegalColoringSpec> {
    if let Some(text) = &input.spec {
        let path = Path::new(text);
        if path.is_file() {
            let json = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let spec: LegalColoringSpec = serde_json::from_str(&json)?;
            return Ok(spec);
        }
    }
    Ok(bench::resolve_spec(input.spec.as_deref(), g, meta)?)
}

fn gs_for(layers: &Layers, meta: Option<&GraphMeta>) -> Result<Option<Vec<Vertex>>> {
    let choice = match layers.gs.as_deref() {
        None => None,
        Some("auto") => Some(GsChoice::Named("auto".into())),
        Some(list) => Some(GsChoice::List(
            list.split(',')
                .map(|v| v.trim().parse::<Vertex>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| anyhow!("--gs takes `auto` or a comma-separated vertex list"))?,
        )),
    };
    let gs = bench::resolve_gs(choice.as_ref(), meta)?;
    if layers.gs.as_deref() == Some("auto") && gs.is_none() {
        log::warn!("--gs auto: the sidecar records no symmetric set; symmetry breaking is off");
    }
    Ok(gs)
}

fn vars_sidecar(out: Option<&Path>, vars: &VarMap) -> Result<()> {
    if let Some(out) = out {
        let mut path = out.as_os_str().to_owned();
        path.push(".vars.json");
        fs::write(&path, vars.to_json()).with_context(|| format!("writing {}", path.to_string_lossy()))?;
    }
    Ok(())
}

fn cmd_encode(input: &GraphInput, encoding: Encoding, layers: &Layers, out: Option<&Path>) -> Result<ExitCode> {
    let (g, meta) = load(input)?;
    let tutte_opts = || -> Result<TutteOptions> {
        Ok(TutteOptions::new(spec_for(input, &g, meta.as_ref())?)
            .with_opt(layers.opt)
            .with_gs(gs_for(layers, meta.as_ref())?))
    };
    let (text, vars) = match encoding {
        Encoding::TutteCnf => {
            let (f, vars) = encode::build_tutte(&g, &tutte_opts()?)?;
            (f.to_dimacs(), Some(vars))
        }
        Encoding::TuttePbxor => {
            let (f, vars) = encode::emit_pbxor_tutte(&g, &tutte_opts()?)?;
            (f.to_pbxor(), Some(vars))
        }
        Encoding::TutteAsp => (encode::emit_asp_tutte(&g, &tutte_opts()?)?, None),
        Encoding::ExactoneCnf => {
            let (f, vars) = encode::build_exactone_cnf(&g)?;
            (f.to_dimacs(), Some(vars))
        }
        Encoding::ExactonePb => {
            let (f, vars) = encode::build_exactone_pb(&g)?;
            (f.to_opb()?, Some(vars))
        }
        Encoding::Qbf => {
            let spec = spec_for(input, &g, meta.as_ref())?;
            let (q, vars) = encode::build_qbf(&g, &spec)?;
            (q.to_qdimacs(), Some(vars))
        }
    };
    emit(out, &text)?;
    if let Some(vars) = vars {
        vars_sidecar(out, &vars)?;
        let line = format!("named vars: {}", vars.named_count());
        if out.is_some() {
            println!("{line}");
        } else {
            eprintln!("{line}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn guess_format(path: &Path) -> Result<InputFormat> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("cnf") | Some("dimacs") => Ok(InputFormat::Cnf),
        Some("qdimacs") => Ok(InputFormat::Qdimacs),
        Some("opb") => Ok(InputFormat::Opb),
        Some("pbxor") => Ok(InputFormat::Pbxor),
        Some("lp") => Ok(InputFormat::Lp),
        _ => bail!("cannot tell the format of {}; pass --format", path.display()),
    }
}

fn cmd_solve(file: &Path, solver_name: &str, format: Option<Format>, timeout: Option<f64>) -> Result<ExitCode> {
    let format = match format {
        Some(f) => f.into(),
        None => guess_format(file)?,
    };
    let timeout = timeout.map(Duration::from_secs_f64);
    let outcome: SolveOutcome = if solver_name == "internal" {
        let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
        let cnf = match format {
            InputFormat::Cnf => parse_dimacs(&text)?,
            InputFormat::Opb | InputFormat::Pbxor => PbFormula::parse(&text)?.to_cnf()?,
            _ => bail!("the internal solver reads cnf, opb and pbxor files"),
        };
        solver::solve_internal_with_timeout(&cnf, timeout)
    } else {
        let registry = SolverRegistry::load()?;
        let mut profile = registry
            .get(solver_name)
            .ok_or_else(|| anyhow!("no solver profile named {solver_name:?}"))?
            .clone();
        if let Some(t) = timeout {
            profile = profile.with_timeout(t.as_secs_f64());
        }
        profile.solve(file, format)
    };
    println!("{}", serde_json::to_string(&outcome)?);
    Ok(match outcome.status {
        Status::Sat => ExitCode::from(10),
        Status::Unsat => ExitCode::from(20),
        Status::Unknown(_) => ExitCode::SUCCESS,
    })
}

fn cmd_check(
    input: &GraphInput,
    method: &str,
    layers: &Layers,
    solver_name: &str,
    timeout: Option<f64>,
    seed: Option<u64>,
    json: bool,
) -> Result<ExitCode> {
    let (g, meta) = load(input)?;
    let spec = spec_for(input, &g, meta.as_ref())?;
    let mut opts = CheckOptions::new(method.parse::<Method>()?);
    opts.opt = layers.opt;
    opts.gs = gs_for(layers, meta.as_ref())?;
    opts.timeout = timeout.map(Duration::from_secs_f64);
    opts.seed = seed;
    if solver_name != "internal" {
        let registry = SolverRegistry::load()?;
        let profile = registry
            .get(solver_name)
            .ok_or_else(|| anyhow!("no solver profile named {solver_name:?}"))?;
        opts.backend = Backend::External(profile.clone());
    }
    let report = check::check(&g, &spec, &opts)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        println!(
            "{} {} via {} ({:.3}s)",
            report.verdict.label(),
            spec,
            report.solver,
            report.time.as_secs_f64()
        );
        match &report.verdict {
            Verdict::Violated { coloring, witness } => {
                if let Some(c) = coloring {
                    println!("coloring: {:?}", c.colors());
                }
                if let Some(w) = witness {
                    println!("tutte set: {:?}", w.tutte_set);
                    println!(
                        "odd components: {} > {} (witness verified)",
                        w.odd_components(&g),
                        w.tutte_set.len()
                    );
                }
            }
            Verdict::Unknown { reason } => println!("reason: {reason}"),
            Verdict::Satisfies => {}
        }
    }
    Ok(ExitCode::from(report.verdict.exit_code() as u8))
}

fn cmd_bench(
    manifest: Option<&Path>,
    preset: Option<&str>,
    out: &Path,
    workers: Option<usize>,
    timeout: Option<f64>,
) -> Result<ExitCode> {
    let (mut m, base) = match (manifest, preset) {
        (Some(path), _) => {
            let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let base = path.parent().unwrap_or(Path::new(".")).to_path_buf();
            (Manifest::from_toml(&text)?, base)
        }
        (None, Some(name)) => (Manifest::preset(name)?, PathBuf::from(".")),
        (None, None) => bail!("give a manifest file or --preset"),
    };
    if timeout.is_some() {
        m.timeout_secs = timeout;
    }
    let registry = SolverRegistry::load()?;
    let records = bench::run_manifest(&m, &base, &registry, workers);
    bench::write_outputs(&records, out)?;
    let solved = records.iter().filter(|r| r.solved()).count();
    println!("{solved}/{} cells decided; results in {}", records.len(), out.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_oracle(question: OracleQuestion, input: &GraphInput) -> Result<ExitCode> {
    let (g, meta) = load(input)?;
    match question {
        OracleQuestion::Pm => println!("{}", oracle::brute_pm(&g)?),
        OracleQuestion::Forall => {
            let spec = spec_for(input, &g, meta.as_ref())?;
            match oracle::brute_forall_pmvc(&g, &spec)? {
                pmvc_core::Decision::Satisfies => println!("SATISFIES"),
                pmvc_core::Decision::Violated(c) => println!("VIOLATED {:?}", c.colors()),
            }
        }
        OracleQuestion::TutteSet => match oracle::brute_tutte_set(&g)? {
            Some(s) => println!("{s:?}"),
            None => println!("none"),
        },
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_dimacs_solve(file: &Path) -> Result<ExitCode> {
    let text = fs::read_to_string(file).with_context(|| format!("reading {}", file.display()))?;
    let f = parse_dimacs(&text)?;
    let outcome = solver::solve_internal(&f);
    let mut stdout = std::io::stdout().lock();
    match (&outcome.status, outcome.assignment()) {
        (Status::Sat, Some(model)) => {
            writeln!(stdout, "s SATISFIABLE")?;
            let mut line = String::from("v");
            for (id, &val) in model.iter().enumerate().skip(1) {
                line.push_str(&format!(" {}", if val { id as i64 } else { -(id as i64) }));
            }
            writeln!(stdout, "{line} 0")?;
            Ok(ExitCode::from(10))
        }
        (Status::Unsat, _) => {
            writeln!(stdout, "s UNSATISFIABLE")?;
            Ok(ExitCode::from(20))
        }
        _ => {
            writeln!(stdout, "s UNKNOWN")?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn cmd_solvers() -> Result<ExitCode> {
    let registry = SolverRegistry::load()?;
    for p in registry.profiles() {
        let formats: Vec<String> = p.formats.iter().map(|f| format!("{f:?}").to_lowercase()).collect();
        let state = if p.is_available() { "available" } else { "missing" };
        println!("{:<10} {:<9} {:<8} {}", p.name, state, formats.join(","), p.command);
    }
    Ok(ExitCode::SUCCESS)
}
