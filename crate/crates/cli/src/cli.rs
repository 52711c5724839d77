use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use lbq::ZeroTest;

use crate::commands;
use crate::report::{InputInfo, Report, Status, TaskReport};
use crate::spec::{Spec, SpecError};

/// Exit code for usage and spec errors.
pub const USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "lbq", version, about = "Quantum corrections for quadratic integrals of Laplace-Beltrami operators")]
pub struct Cli {
    /// Seed for the randomized zero test.
    #[arg(long, global = true, env = "LBQ_SEED", default_value_t = ZeroTest::default().seed)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Add wall-clock time to the report (breaks byte-identical output).
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, Debug, ValueEnum, PartialEq, Eq)]
pub enum Check {
    Killing,
    Poisson,
    Carter,
    Robertson,
    PreRobertson,
}

impl Check {
    fn name(self) -> &'static str {
        match self {
            Check::Killing => "killing",
            Check::Poisson => "poisson",
            Check::Carter => "carter",
            Check::Robertson => "robertson",
            Check::PreRobertson => "pre-robertson",
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Christoffel symbols, Ricci tensor, scalar curvature, Weyl and Cotton-York data.
    Curvature {
        file: PathBuf,
        /// Golden value to compare, as `sc=EXPR` or `weyl=EXPR`.
        #[arg(long = "expect", value_parser = key_value, allow_hyphen_values = true)]
        expect: Vec<(String, String)>,
    },
    /// Classical conditions on the observables of a spec.
    Check {
        file: PathBuf,
        #[arg(long, value_enum)]
        what: Check,
        #[arg(long)]
        observable: Option<String>,
    },
    /// Solve for E_K given E.
    SolveCorrection {
        file: PathBuf,
        #[arg(long)]
        observable: String,
        /// Expression or name of a correction block.
        #[arg(long = "E", allow_hyphen_values = true)]
        e: String,
        #[arg(long = "expect-ek", allow_hyphen_values = true)]
        expect_ek: Option<String>,
    },
    /// One E for all listed corrected integrals.
    Simultaneous {
        file: PathBuf,
        /// Expression, family block name, or inline family with --constants.
        #[arg(long = "E", allow_hyphen_values = true)]
        e: String,
        #[arg(long, value_delimiter = ',')]
        constants: Vec<String>,
    },
    /// Corrections of a separable system.
    Stackel {
        file: PathBuf,
        #[arg(long = "E", allow_hyphen_values = true)]
        e: String,
    },
    /// Conformal-Laplacian obstruction for one observable.
    RadObstruction {
        file: PathBuf,
        #[arg(long)]
        observable: String,
    },
    /// Commutator of the two quantized operators, cross-checked against the tensorial test.
    VerifyCommute {
        file: PathBuf,
        /// Two observable names, `H,K`.
        #[arg(long, value_delimiter = ',', num_args = 1)]
        pair: Vec<String>,
        /// Expression, or a correction block name supplying both E and E_K.
        #[arg(long = "E", allow_hyphen_values = true)]
        e: Option<String>,
        #[arg(long = "EK", allow_hyphen_values = true)]
        ek: Option<String>,
    },
    /// Execute the [[task]] list of a spec and compare exit codes.
    Run { file: PathBuf },
}

fn key_value(s: &str) -> Result<(String, String), String> {
    s.split_once('=')
        .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
        .ok_or_else(|| format!("expected KEY=EXPR, got `{s}`"))
}

impl Command {
    fn file(&self) -> &Path {
        match self {
            Command::Curvature { file, .. }
            | Command::Check { file, .. }
            | Command::SolveCorrection { file, .. }
            | Command::Simultaneous { file, .. }
            | Command::Stackel { file, .. }
            | Command::RadObstruction { file, .. }
            | Command::VerifyCommute { file, .. }
            | Command::Run { file } => file,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Command::Curvature { .. } => "curvature",
            Command::Check { .. } => "check",
            Command::SolveCorrection { .. } => "solve-correction",
            Command::Simultaneous { .. } => "simultaneous",
            Command::Stackel { .. } => "stackel",
            Command::RadObstruction { .. } => "rad-obstruction",
            Command::VerifyCommute { .. } => "verify-commute",
            Command::Run { .. } => "run",
        }
    }
}

/// Rendered output and the process exit code.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub output: String,
    pub code: i32,
    pub report: Option<Report>,
    /// Command-line usage error, printed to stderr.
    pub usage: bool,
}

fn dispatch(spec: &Spec, cmd: &Command, seed: u64) -> Result<Vec<TaskReport>, SpecError> {
    match cmd {
        Command::Curvature { expect, .. } => commands::curvature(spec, expect),
        Command::Check { what, observable, .. } => commands::check(spec, what.name(), observable.as_deref()),
        Command::SolveCorrection { observable, e, expect_ek, .. } => {
            commands::solve(spec, observable, e, expect_ek.as_deref())
        }
        Command::Simultaneous { e, constants, .. } => commands::simultaneous(spec, e, constants),
        Command::Stackel { e, .. } => commands::stackel(spec, e),
        Command::RadObstruction { observable, .. } => commands::rad(spec, observable),
        Command::VerifyCommute { pair, e, ek, .. } => match pair.as_slice() {
            [h, k] => commands::verify_commute(spec, h, k, e.as_deref(), ek.as_deref()),
            _ => Err(SpecError::Invalid("--pair takes two observable names, H,K".into())),
        },
        Command::Run { file } => Ok(run_tasks(spec, file, seed)),
    }
}

fn run_tasks(spec: &Spec, file: &Path, seed: u64) -> Vec<TaskReport> {
    use rayon::prelude::*;
    spec.tasks
        .par_iter()
        .map(|t| {
            let mut argv: Vec<String> = vec!["lbq".into()];
            let mut it = t.args.iter();
            argv.extend(it.next().cloned());
            argv.push(file.display().to_string());
            argv.extend(it.cloned());
            argv.extend(["--seed".to_string(), seed.to_string()]);
            let got = execute(&argv).code;
            let label = t.args.join(" ");
            let mut r = TaskReport::new("task", Some(&label))
                .value("expected_exit", t.expect)
                .value("exit", got);
            if !t.note.is_empty() {
                r = r.value("note", t.note.as_str());
            }
            r.status = if got == t.expect { Status::Holds } else { Status::Fails };
            r
        })
        .collect()
}

#[derive(serde::Serialize)]
struct ErrorReport<'a> {
    schema: &'static str,
    command: &'a str,
    path: String,
    error: &'a str,
    exit_code: i32,
}

fn error_output(format: Format, command: &str, path: &Path, message: &str) -> String {
    match format {
        Format::Json => {
            let r = ErrorReport {
                schema: crate::report::SCHEMA,
                command,
                path: path.display().to_string(),
                error: message,
                exit_code: USAGE,
            };
            serde_json::to_string_pretty(&r).expect("json") + "\n"
        }
        Format::Text => format!("error: {message}\n"),
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn execute<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            return Outcome { output: e.render().to_string(), code, report: None, usage: code == USAGE };
        }
    };
    run(&cli)
}

pub fn run(cli: &Cli) -> Outcome {
    let start = Instant::now();
    let file = cli.command.file();
    let spec = match Spec::load(file, cli.seed) {
        Ok(s) => s,
        Err(e) => {
            let output = error_output(cli.format, cli.command.name(), file, &e.to_string());
            return Outcome { output, code: USAGE, report: None, usage: false };
        }
    };
    let results = match dispatch(&spec, &cli.command, cli.seed) {
        Ok(r) => r,
        Err(e) => {
            let output = error_output(cli.format, cli.command.name(), file, &e.to_string());
            return Outcome { output, code: USAGE, report: None, usage: false };
        }
    };
    let input = InputInfo { path: file.display().to_string(), name: spec.name.clone(), sha256: spec.digest.clone() };
    let mut report = Report::new(cli.command.name(), input, cli.seed, results);
    if cli.timing {
        report.timing_ms = Some(start.elapsed().as_secs_f64() * 1e3);
    }
    let output = match cli.format {
        Format::Json => report.to_json() + "\n",
        Format::Text => report.summary(),
    };
    Outcome { output, code: report.exit_code, report: Some(report), usage: false }
}
