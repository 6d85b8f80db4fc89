//! The `nslen` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::constructions::build_expression;
use crate::error::{Error, Result};
use crate::group::{PermGroup, DEFAULT_ENUM_CAP};
use crate::hom::DEFAULT_INDEX_CAP;
use crate::io::{collect_inputs, load, GroupFile};
use crate::mode::{Mode, Strategy, DEFAULT_EXACT_CAP, DEFAULT_SAMPLES};
use crate::report::{GroupEntry, Report};
use crate::verifier::{
    analyze, corollary2_check, corollary3_check, focal_check, kernel_lemma_check, prop22_check, theorem1_check,
    word_report, CheckOptions, CheckReport,
};
use crate::words::{gamma, parse_word_spec, Word};

#[derive(Parser, Debug)]
#[command(
    name = "nslen",
    version,
    about = "Non-p-soluble length of permutation groups and checks of its bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a group file from a construction expression.
    Build {
        /// e.g. `wreath(alternating(5),cyclic(5))`
        expr: String,
        #[arg(long)]
        name: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Orders, radicals, canonical series and p-kernel.
    Analyze {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run one of the checks on every input group.
    Verify {
        check: CheckKind,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Value sets, verbal exponent and verbal subgroup of a word.
    Word {
        #[command(flatten)]
        run: RunArgs,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum CheckKind {
    Theorem1,
    Corollary2,
    Corollary3,
    Prop22,
    Kernel,
    Focal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum ModeArg {
    Auto,
    Exact,
    Randomized,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum Format {
    Json,
    Tsv,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Group files, directories of group files, or construction expressions.
    #[arg(required = true)]
    inputs: Vec<String>,
    /// Primes, comma separated.
    #[arg(long, value_delimiter = ',')]
    prime: Vec<u64>,
    /// Values of n, comma separated.
    #[arg(long, value_delimiter = ',')]
    n: Vec<usize>,
    /// Multilinear word, or dN / gN for the derived and lower central words.
    #[arg(long)]
    word: Option<String>,
    /// Use this exponent instead of the measured one.
    #[arg(long)]
    e: Option<u32>,
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Random elements per sampled radical scan.
    #[arg(long, default_value_t = DEFAULT_SAMPLES)]
    samples: usize,
    /// Largest group order handled by exhaustive class scans.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    exact_cap: u64,
    #[arg(long, default_value_t = DEFAULT_INDEX_CAP)]
    index_cap: u64,
    #[arg(long, default_value_t = DEFAULT_ENUM_CAP)]
    enum_cap: u64,
    /// Permit p = 2 for the Sylow-based checks (exploratory).
    #[arg(long)]
    allow_p2: bool,
    /// Measure the exponent on delta_{n-1} instead of delta_n.
    #[arg(long)]
    delta_shift: bool,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    /// Record per-check runtimes (makes reports non-reproducible).
    #[arg(long)]
    timings: bool,
}

#[derive(Serialize)]
struct ConfigEcho<'a> {
    command: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    check: Option<CheckKind>,
    inputs: &'a [String],
    primes: &'a [u64],
    n: &'a [usize],
    word: Option<&'a str>,
    e: Option<u32>,
    mode: ModeArg,
    seed: u64,
    samples: usize,
    exact_cap: u64,
    index_cap: u64,
    enum_cap: u64,
    allow_p2: bool,
    delta_shift: bool,
    format: Format,
}

impl RunArgs {
    fn options(&self) -> CheckOptions {
        let strategy = match self.mode {
            ModeArg::Auto => Strategy::Auto,
            ModeArg::Exact => Strategy::Exact,
            ModeArg::Randomized => Strategy::Randomized,
        };
        let mut opts = CheckOptions::new(self.seed);
        opts.mode = Mode {
            strategy,
            exact_cap: self.exact_cap,
            samples: self.samples,
            seed: self.seed,
            index_cap: self.index_cap,
        };
        opts.values.enum_cap = self.enum_cap;
        opts.e_override = self.e;
        opts.allow_p2 = self.allow_p2;
        opts.delta_shift = self.delta_shift;
        opts
    }

    fn echo<'a>(&'a self, command: &'a str, check: Option<CheckKind>) -> ConfigEcho<'a> {
        ConfigEcho {
            command,
            check,
            inputs: &self.inputs,
            primes: &self.prime,
            n: &self.n,
            word: self.word.as_deref(),
            e: self.e,
            mode: self.mode,
            seed: self.seed,
            samples: self.samples,
            exact_cap: self.exact_cap,
            index_cap: self.index_cap,
            enum_cap: self.enum_cap,
            allow_p2: self.allow_p2,
            delta_shift: self.delta_shift,
            format: self.format,
        }
    }

    fn word(&self, default: Option<Word>) -> Result<Word> {
        match (&self.word, default) {
            (Some(text), _) => parse_word_spec(text),
            (None, Some(w)) => Ok(w),
            (None, None) => Err(Error::InvalidArgument("--word is required".into())),
        }
    }

    fn primes(&self) -> Result<&[u64]> {
        if self.prime.is_empty() {
            return Err(Error::InvalidArgument("--prime is required".into()));
        }
        Ok(&self.prime)
    }
}

/// An input group: a file, or an expression when no such path exists.
enum Input {
    File(PathBuf),
    Expr(String),
}

fn resolve_inputs(raw: &[String]) -> Result<Vec<Input>> {
    let mut out = Vec::new();
    for s in raw {
        let path = Path::new(s);
        if path.exists() {
            for p in collect_inputs(&[path.to_path_buf()])? {
                out.push(Input::File(p));
            }
        } else if s.contains('(') {
            out.push(Input::Expr(s.clone()));
        } else {
            return Err(Error::InvalidArgument(format!("no such input: {s}")));
        }
    }
    Ok(out)
}

fn load_input(input: &Input) -> (String, Result<PermGroup>) {
    match input {
        Input::File(p) => match load(p) {
            Ok((name, g)) => (name, Ok(g)),
            Err(e) => (p.display().to_string(), Err(e)),
        },
        Input::Expr(s) => (s.clone(), build_expression(s)),
    }
}

type Job<'a> = dyn Fn(&PermGroup, &str) -> Result<Vec<CheckReport>> + Sync + 'a;

fn run_jobs(inputs: &[Input], workers: usize, timings: bool, job: &Job<'_>) -> Result<Vec<GroupEntry>> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(|| {
        inputs
            .par_iter()
            .map(|input| {
                let (name, group) = load_input(input);
                let group = match group {
                    Ok(g) => g,
                    Err(e) => {
                        return GroupEntry {
                            name,
                            order: None,
                            checks: Vec::new(),
                            error: Some(e.to_string()),
                        }
                    }
                };
                let order = Some(group.order().to_string());
                let start = Instant::now();
                match job(&group, &name) {
                    Ok(mut checks) => {
                        if timings {
                            let ms = start.elapsed().as_millis() as u64;
                            for c in &mut checks {
                                c.runtime_ms = Some(ms);
                            }
                        }
                        GroupEntry {
                            name,
                            order,
                            checks,
                            error: None,
                        }
                    }
                    Err(e) => GroupEntry {
                        name,
                        order,
                        checks: Vec::new(),
                        error: Some(e.to_string()),
                    },
                }
            })
            .collect()
    }))
}

fn emit(run: &RunArgs, report: &Report, stdout: &mut dyn Write) -> Result<()> {
    let text = match run.format {
        Format::Json => report.to_json(),
        Format::Tsv => report.to_tsv(),
    };
    match &run.out {
        Some(path) => fs::write(path, text)?,
        None => stdout.write_all(text.as_bytes())?,
    }
    Ok(())
}

fn verify_job<'a>(check: CheckKind, run: &'a RunArgs, opts: &'a CheckOptions) -> Result<Box<Job<'a>>> {
    let ns: Vec<usize> = if run.n.is_empty() { vec![1] } else { run.n.clone() };
    Ok(match check {
        CheckKind::Theorem1 => {
            let primes = run.primes()?.to_vec();
            Box::new(move |g, name| {
                let mut out = Vec::new();
                for &p in &primes {
                    for &n in &ns {
                        out.push(theorem1_check(g, name, p, n, opts)?);
                    }
                }
                Ok(out)
            })
        }
        CheckKind::Corollary2 => {
            let primes = run.primes()?.to_vec();
            let w = run.word(None)?;
            Box::new(move |g, name| primes.iter().map(|&p| corollary2_check(g, name, p, &w, opts)).collect())
        }
        CheckKind::Corollary3 => {
            let w = run.word(Some(gamma(2)?))?;
            Box::new(move |g, name| Ok(vec![corollary3_check(g, name, &w, opts)?]))
        }
        CheckKind::Focal => {
            let w = run.word(Some(gamma(2)?))?;
            Box::new(move |g, name| Ok(vec![focal_check(g, name, &w, opts)?]))
        }
        CheckKind::Prop22 => {
            let primes = run.primes()?.to_vec();
            Box::new(move |g, name| primes.iter().map(|&p| prop22_check(g, name, p, opts)).collect())
        }
        CheckKind::Kernel => {
            let primes = run.primes()?.to_vec();
            Box::new(move |g, name| primes.iter().map(|&p| kernel_lemma_check(g, name, p, opts)).collect())
        }
    })
}

fn execute(cli: Cli, stdout: &mut dyn Write) -> Result<i32> {
    let (run, command, check) = match &cli.command {
        Command::Build { expr, name, out } => {
            let g = build_expression(expr)?;
            let name = name.clone().unwrap_or_else(|| expr.clone());
            let text = GroupFile::from_group(&name, &g).render();
            match out {
                Some(path) => fs::write(path, text)?,
                None => stdout.write_all(text.as_bytes())?,
            }
            return Ok(0);
        }
        Command::Analyze { run } => (run, "analyze", None),
        Command::Verify { check, run } => (run, "verify", Some(*check)),
        Command::Word { run } => (run, "word", None),
    };
    let opts = run.options();
    let inputs = resolve_inputs(&run.inputs)?;
    let job: Box<Job<'_>> = match (command, check) {
        ("verify", Some(kind)) => verify_job(kind, run, &opts)?,
        ("analyze", _) => {
            let primes = run.primes()?.to_vec();
            Box::new(move |g: &PermGroup, name: &str| primes.iter().map(|&p| analyze(g, name, p, &opts)).collect())
        }
        _ => {
            let w = run.word(None)?;
            let primes: Vec<Option<u64>> = if run.prime.is_empty() {
                vec![None]
            } else {
                run.prime.iter().map(|&p| Some(p)).collect()
            };
            Box::new(move |g: &PermGroup, name: &str| {
                primes.iter().map(|&p| word_report(g, name, &w, p, &opts)).collect()
            })
        }
    };
    let groups = run_jobs(&inputs, run.workers, run.timings, job.as_ref())?;
    let config = serde_json::to_value(run.echo(command, check)).expect("config serializes");
    let report = Report::new(config, groups);
    emit(run, &report, stdout)?;
    for g in &report.groups {
        if let Some(e) = &g.error {
            eprintln!("nslen: {}: {e}", g.name);
        }
    }
    Ok(report.exit_code())
}

/// Runs the command line `argv` (including the program name) and returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    run_with_output(argv, &mut std::io::stdout())
}

pub fn run_with_output<I, T>(argv: I, stdout: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nslen: {e}");
            2
        }
    }
}
