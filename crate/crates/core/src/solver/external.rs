//! Subprocess solvers described by user-editable profiles.
//!
//! A profile is a command template with a single `{input}` placeholder plus
//! the answer grammar used to read the transcript. Competition conventions
//! (`s`/`v` lines, exit codes 10/20) are the default.

use std::io::Read;
use std::os::unix::process::CommandExt;
use std::path::Path;
use std::process::{Command, Stdio};
use std::thread;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::{Model, SolveOutcome, Status, UnknownReason};
use crate::error::{Error, Result};

/// Environment variable naming a TOML file of extra or overriding profiles.
pub const CONFIG_ENV: &str = "PMVC_SOLVERS";

pub const DEFAULT_TIMEOUT_SECS: f64 = 1000.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InputFormat {
    Cnf,
    Qdimacs,
    Opb,
    Pbxor,
    Lp,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelStyle {
    /// No model expected.
    None,
    /// `v 1 -2 3 0` lines.
    Dimacs,
    /// `v x1 -x2 x3` lines.
    Opb,
    /// The atoms following an `Answer: N` line.
    Answer,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnswerGrammar {
    #[serde(default = "sat_exit")]
    pub sat_exit: Option<i32>,
    #[serde(default = "unsat_exit")]
    pub unsat_exit: Option<i32>,
    #[serde(default = "dimacs_models")]
    pub models: ModelStyle,
}

fn sat_exit() -> Option<i32> {
    Some(10)
}

fn unsat_exit() -> Option<i32> {
    Some(20)
}

fn dimacs_models() -> ModelStyle {
    ModelStyle::Dimacs
}

impl Default for AnswerGrammar {
    fn default() -> Self {
        AnswerGrammar {
            sat_exit: sat_exit(),
            unsat_exit: unsat_exit(),
            models: dimacs_models(),
        }
    }
}

fn default_timeout() -> f64 {
    DEFAULT_TIMEOUT_SECS
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverProfile {
    pub name: String,
    /// Command line with exactly one `{input}` placeholder.
    pub command: String,
    pub formats: Vec<InputFormat>,
    #[serde(flatten)]
    pub grammar: AnswerGrammar,
    #[serde(default = "default_timeout")]
    pub timeout_secs: f64,
    /// Command whose success means the solver is installed. Defaults to
    /// looking up the program on `PATH`.
    #[serde(default)]
    pub probe: Option<String>,
}

impl SolverProfile {
    pub fn new(name: &str, command: &str, formats: &[InputFormat], grammar: AnswerGrammar) -> Result<Self> {
        let p = SolverProfile {
            name: name.to_string(),
            command: command.to_string(),
            formats: formats.to_vec(),
            grammar,
            timeout_secs: DEFAULT_TIMEOUT_SECS,
            probe: None,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        let count = self.command.matches("{input}").count();
        if count != 1 {
            return Err(Error::SolverConfig(format!(
                "profile {:?}: command must contain {{input}} exactly once, found {count}",
                self.name
            )));
        }
        if self.timeout_secs.is_nan() || self.timeout_secs <= 0.0 {
            return Err(Error::SolverConfig(format!(
                "profile {:?}: timeout must be positive",
                self.name
            )));
        }
        split_command(&self.command)?;
        Ok(())
    }

    pub fn with_timeout(mut self, secs: f64) -> Self {
        self.timeout_secs = secs;
        self
    }

    pub fn accepts(&self, format: InputFormat) -> bool {
        self.formats.contains(&format)
    }

    pub fn is_available(&self) -> bool {
        match &self.probe {
            Some(probe) => split_command(probe)
                .ok()
                .and_then(|argv| {
                    Command::new(&argv[0])
                        .args(&argv[1..])
                        .stdout(Stdio::null())
                        .stderr(Stdio::null())
                        .status()
                        .ok()
                })
                .is_some_and(|s| s.success()),
            None => split_command(&self.command)
                .ok()
                .is_some_and(|argv| find_program(&argv[0])),
        }
    }

    fn argv(&self, input: &Path) -> Result<Vec<String>> {
        let input = input.to_string_lossy();
        Ok(split_command(&self.command)?
            .into_iter()
            .map(|a| a.replace("{input}", &input))
            .collect())
    }

    /// Runs the solver on `input` under the profile's wall-clock limit.
    pub fn solve(&self, input: &Path, format: InputFormat) -> SolveOutcome {
        let start = Instant::now();
        let fail = |msg: String| SolveOutcome {
            status: Status::Unknown(UnknownReason::Error(msg.clone())),
            model: None,
            wall_time: start.elapsed(),
            solver: self.name.clone(),
            message: Some(msg),
        };
        if let Err(e) = self.validate() {
            return fail(e.to_string());
        }
        let expected_vars = match declared_vars(input, format) {
            Ok(v) => v,
            Err(e) => return fail(e.to_string()),
        };
        let argv = match self.argv(input) {
            Ok(a) => a,
            Err(e) => return fail(e.to_string()),
        };
        let run = match run_with_timeout(&argv, Duration::from_secs_f64(self.timeout_secs)) {
            Ok(r) => r,
            Err(e) => return fail(format!("launching {:?}: {e}", argv[0])),
        };
        if run.timed_out {
            return SolveOutcome {
                status: Status::Unknown(UnknownReason::Timeout),
                model: None,
                wall_time: start.elapsed(),
                solver: self.name.clone(),
                message: None,
            };
        }
        let (status, model) = parse_transcript(&run.stdout, run.exit_code, &self.grammar, expected_vars);
        let message = match &status {
            Status::Unknown(UnknownReason::Error(m)) => Some(format!("{m}; stderr: {}", run.stderr.trim())),
            _ => None,
        };
        SolveOutcome {
            status,
            model,
            wall_time: start.elapsed(),
            solver: self.name.clone(),
            message,
        }
    }
}

struct RunResult {
    stdout: String,
    stderr: String,
    exit_code: Option<i32>,
    timed_out: bool,
}

fn run_with_timeout(argv: &[String], timeout: Duration) -> std::io::Result<RunResult> {
    let mut child = Command::new(&argv[0])
        .args(&argv[1..])
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .process_group(0)
        .spawn()?;
    let mut out = child.stdout.take().expect("stdout piped");
    let mut err = child.stderr.take().expect("stderr piped");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err.read_to_string(&mut s);
        s
    });
    let deadline = Instant::now() + timeout;
    let mut timed_out = false;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if Instant::now() >= deadline {
            timed_out = true;
            // Kill the whole process group so wrapper scripts take their
            // children down with them.
            unsafe {
                libc::kill(-(child.id() as i32), libc::SIGKILL);
            }
            let _ = child.wait();
            break None;
        }
        thread::sleep(Duration::from_millis(5));
    };
    Ok(RunResult {
        stdout: out_reader.join().unwrap_or_default(),
        stderr: err_reader.join().unwrap_or_default(),
        exit_code: status.and_then(|s| s.code()),
        timed_out,
    })
}

/// Variable count declared by the input file, used to check model coverage.
fn declared_vars(input: &Path, format: InputFormat) -> Result<Option<u32>> {
    let text = std::fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
    let found = match format {
        InputFormat::Cnf | InputFormat::Qdimacs => text
            .lines()
            .find_map(|l| l.trim().strip_prefix("p cnf "))
            .and_then(|rest| rest.split_whitespace().next()?.parse().ok()),
        InputFormat::Opb | InputFormat::Pbxor => text
            .lines()
            .find_map(|l| l.split_once("#variable="))
            .and_then(|(_, rest)| rest.split_whitespace().next()?.parse().ok()),
        InputFormat::Lp => return Ok(None),
    };
    found
        .map(Some)
        .ok_or_else(|| Error::parse(0, format!("{}: no variable count header", input.display())))
}

/// Reads a solver transcript. Status lines win over exit codes; a SAT claim
/// without a parseable, complete model (when the grammar expects one) is
/// downgraded to an error.
pub fn parse_transcript(
    stdout: &str,
    exit_code: Option<i32>,
    grammar: &AnswerGrammar,
    expected_vars: Option<u32>,
) -> (Status, Option<Model>) {
    let error = |m: &str| (Status::Unknown(UnknownReason::Error(m.to_string())), None);
    let mut claimed: Option<Status> = None;
    for line in stdout.lines().map(str::trim) {
        let status = match line {
            "s SATISFIABLE" | "SATISFIABLE" => Some(Status::Sat),
            "s UNSATISFIABLE" | "UNSATISFIABLE" => Some(Status::Unsat),
            "s UNKNOWN" | "s INDETERMINATE" | "UNKNOWN" => {
                Some(Status::Unknown(UnknownReason::Error("solver reported unknown".into())))
            }
            _ => match line.strip_prefix("s cnf ") {
                Some(rest) if rest.starts_with('1') => Some(Status::Sat),
                Some(rest) if rest.starts_with('0') => Some(Status::Unsat),
                Some(_) => Some(Status::Unknown(UnknownReason::Error("solver reported unknown".into()))),
                None => None,
            },
        };
        match (status, &claimed) {
            (Some(s), None) => claimed = Some(s),
            (Some(s), Some(prev)) if &s != prev => return error("contradictory status lines"),
            _ => {}
        }
    }
    let by_exit = match exit_code {
        Some(c) if Some(c) == grammar.sat_exit => Some(Status::Sat),
        Some(c) if Some(c) == grammar.unsat_exit => Some(Status::Unsat),
        _ => None,
    };
    let status = match (claimed, by_exit) {
        (Some(s), Some(e)) if s.is_known() && s != e => return error("exit code contradicts status line"),
        (Some(s), _) => s,
        (None, Some(e)) => e,
        (None, None) => return error("no status in solver output"),
    };
    if !status.is_sat() || grammar.models == ModelStyle::None {
        return (status, None);
    }
    let model = match grammar.models {
        ModelStyle::Dimacs => parse_v_lines(stdout, expected_vars, |tok| {
            let raw: i64 = tok.parse().ok()?;
            Some((raw.unsigned_abs() as u32, raw > 0))
        }),
        ModelStyle::Opb => parse_v_lines(stdout, expected_vars, |tok| {
            let (neg, name) = match tok.strip_prefix('-').or_else(|| tok.strip_prefix('~')) {
                Some(rest) => (true, rest),
                None => (false, tok),
            };
            Some((name.strip_prefix('x')?.parse().ok()?, !neg))
        }),
        ModelStyle::Answer => parse_answer(stdout),
        ModelStyle::None => unreachable!(),
    };
    match model {
        Some(m) => (Status::Sat, Some(m)),
        None => error("SAT without a complete model"),
    }
}

fn parse_v_lines(
    stdout: &str,
    expected_vars: Option<u32>,
    literal: impl Fn(&str) -> Option<(u32, bool)>,
) -> Option<Model> {
    let mut values: Vec<Option<bool>> = vec![None];
    let mut any = false;
    for line in stdout.lines() {
        let Some(rest) = line
            .trim()
            .strip_prefix("v ")
            .or_else(|| (line.trim() == "v").then_some(""))
        else {
            continue;
        };
        any = true;
        for tok in rest.split_whitespace() {
            if tok == "0" {
                continue;
            }
            let (var, val) = literal(tok)?;
            if var == 0 {
                return None;
            }
            let idx = var as usize;
            if idx >= values.len() {
                values.resize(idx + 1, None);
            }
            values[idx] = Some(val);
        }
    }
    if !any {
        return None;
    }
    let n = expected_vars.map(|v| v as usize).unwrap_or(values.len() - 1);
    if values.len() < n + 1 {
        return None;
    }
    let assignment: Option<Vec<bool>> = std::iter::once(Some(false))
        .chain(values[1..=n].iter().copied())
        .collect();
    assignment.map(Model::Assignment)
}

fn parse_answer(stdout: &str) -> Option<Model> {
    let mut lines = stdout.lines();
    lines.find(|l| l.trim_start().starts_with("Answer:"))?;
    let atoms = lines.next().unwrap_or("");
    Some(Model::Atoms(atoms.split_whitespace().map(str::to_string).collect()))
}

fn find_program(name: &str) -> bool {
    if name.contains('/') {
        return Path::new(name).is_file();
    }
    std::env::var_os("PATH")
        .map(|paths| std::env::split_paths(&paths).any(|dir| dir.join(name).is_file()))
        .unwrap_or(false)
}

/// Whitespace split with single and double quotes.
pub fn split_command(cmd: &str) -> Result<Vec<String>> {
    let mut args = Vec::new();
    let mut cur = String::new();
    let mut in_arg = false;
    let mut quote: Option<char> = None;
    for ch in cmd.chars() {
        match (quote, ch) {
            (Some(q), c) if c == q => quote = None,
            (Some(_), c) => cur.push(c),
            (None, '\'' | '"') => {
                quote = Some(ch);
                in_arg = true;
            }
            (None, c) if c.is_whitespace() => {
                if in_arg {
                    args.push(std::mem::take(&mut cur));
                    in_arg = false;
                }
            }
            (None, c) => {
                cur.push(c);
                in_arg = true;
            }
        }
    }
    if quote.is_some() {
        return Err(Error::SolverConfig(format!("unbalanced quote in {cmd:?}")));
    }
    if in_arg {
        args.push(cur);
    }
    if args.is_empty() {
        return Err(Error::SolverConfig("empty command".into()));
    }
    Ok(args)
}

#[derive(Serialize, Deserialize)]
struct ConfigFile {
    #[serde(default)]
    solver: Vec<SolverProfile>,
}

/// The known solver profiles: shipped defaults merged with the user's file.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverRegistry {
    profiles: Vec<SolverProfile>,
}

impl SolverRegistry {
    pub fn defaults() -> Self {
        let competition = AnswerGrammar::default();
        let status_only = AnswerGrammar {
            models: ModelStyle::None,
            ..AnswerGrammar::default()
        };
        let clasp_probe = Some("python3 -c 'import clingo'".to_string());
        let profiles = vec![
            profile(
                "kissat",
                "kissat -q {input}",
                &[InputFormat::Cnf],
                competition.clone(),
                None,
            ),
            profile(
                "cadical",
                "cadical -q {input}",
                &[InputFormat::Cnf],
                competition.clone(),
                None,
            ),
            profile(
                "clasp",
                "python3 -m clingo --mode=clasp --verbose=0 {input}",
                &[InputFormat::Cnf],
                competition.clone(),
                clasp_probe.clone(),
            ),
            profile(
                "clasp-opb",
                "python3 -m clingo --mode=clasp --verbose=0 {input}",
                &[InputFormat::Opb],
                AnswerGrammar {
                    models: ModelStyle::Opb,
                    ..AnswerGrammar::default()
                },
                clasp_probe.clone(),
            ),
            profile(
                "clingo",
                "python3 -m clingo --outf=0 {input}",
                &[InputFormat::Lp],
                AnswerGrammar {
                    sat_exit: Some(10),
                    unsat_exit: Some(20),
                    models: ModelStyle::Answer,
                },
                clasp_probe,
            ),
            profile(
                "linpb",
                "linpb {input}",
                &[InputFormat::Pbxor],
                status_only.clone(),
                None,
            ),
            profile(
                "depqbf",
                "depqbf {input}",
                &[InputFormat::Qdimacs],
                status_only.clone(),
                None,
            ),
            profile(
                "pyqbf",
                "python3 -c 'import sys; from pyqbf.formula import PCNF; from pyqbf.solvers import solve; \
                 r = solve(PCNF(from_file=sys.argv[1])); print(\"s cnf\", int(r)); sys.exit(10 if r else 20)' {input}",
                &[InputFormat::Qdimacs],
                status_only,
                Some("python3 -c 'import pyqbf.solvers'".to_string()),
            ),
        ];
        SolverRegistry { profiles }
    }

    /// Defaults, overridden by the file named in `PMVC_SOLVERS` if set.
    pub fn load() -> Result<Self> {
        let mut reg = Self::defaults();
        if let Some(path) = std::env::var_os(CONFIG_ENV) {
            let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            reg.merge_toml(&text)?;
        }
        Ok(reg)
    }

    pub fn merge_toml(&mut self, text: &str) -> Result<()> {
        let file: ConfigFile =
            toml::from_str(text).map_err(|e| Error::SolverConfig(format!("bad solver config: {e}")))?;
        for p in file.solver {
            p.validate()?;
            match self.profiles.iter_mut().find(|q| q.name == p.name) {
                Some(slot) => *slot = p,
                None => self.profiles.push(p),
            }
        }
        Ok(())
    }

    pub fn profiles(&self) -> &[SolverProfile] {
        &self.profiles
    }

    pub fn get(&self, name: &str) -> Option<&SolverProfile> {
        self.profiles.iter().find(|p| p.name == name)
    }

    /// First installed profile that reads `format`.
    pub fn first_available(&self, format: InputFormat) -> Option<&SolverProfile> {
        self.profiles.iter().find(|p| p.accepts(format) && p.is_available())
    }
}

fn profile(
    name: &str,
    command: &str,
    formats: &[InputFormat],
    grammar: AnswerGrammar,
    probe: Option<String>,
) -> SolverProfile {
    SolverProfile {
        probe,
        ..SolverProfile::new(name, command, formats, grammar).expect("shipped profiles are valid")
    }
}
