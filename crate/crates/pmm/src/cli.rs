//! The `pmm` command line.
//!
//! Exit codes: 0 success, 1 usage/parse/input errors, 2 decoder stuck,
//! 3 certificate FAIL, 4 exhaustive cutoff exceeded. Every nonzero exit
//! writes one `error[<Kind>]: <message>` line to stderr.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_rational::BigRational;
use pmm_core::certify::{check_hierarchy, verify_witness, Certificate, Level, Mode};
use pmm_core::decoder::{answer_all, decode, DecodeOutcome};
use pmm_core::querygen::{generate_query_set, QueryCount, QuerySet};
use pmm_core::Cutoffs;

use crate::bench::{parse_constant, run_bench, write_csv};
use crate::format::{
    format_bounds_report, format_certificate, format_transcript, parse_permutation, read_feedback,
    read_query_set, read_triples, write_feedback, write_query_set, FormatError,
};
use crate::parallel;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_STUCK: i32 = 2;
pub const EXIT_FAIL: i32 = 3;
pub const EXIT_CUTOFF: i32 = 4;

/// Environment variable overriding the exhaustive cutoffs: `N` sets both,
/// `E,T` sets the permutation and triple cutoffs separately.
pub const CUTOFF_ENV: &str = "PMM_CUTOFF";

#[derive(Parser, Debug)]
#[command(name = "pmm", version, about = "Static permutation Mastermind toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a random query set.
    Gen {
        #[arg(long)]
        n: usize,
        /// Number of queries, or `auto` for ⌈28 n ln n⌉.
        #[arg(long, default_value = "auto")]
        count: String,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Answer every query for a codeword.
    Answer {
        #[arg(long)]
        queries: PathBuf,
        /// Space-separated colours, e.g. "2 3 1".
        #[arg(long)]
        codeword: String,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Recover the codeword from a feedback file.
    Decode {
        #[arg(long)]
        queries: PathBuf,
        #[arg(long)]
        feedback: PathBuf,
    },
    /// Certify a query set.
    Certify {
        #[arg(long)]
        queries: PathBuf,
        /// unique-feedback, decode-all, lemma-triples, a comma-separated list, or all.
        #[arg(long)]
        level: String,
        #[arg(long, conflicts_with = "mc")]
        exhaustive: bool,
        /// Monte Carlo with this many trials.
        #[arg(long, requires = "seed")]
        mc: Option<u64>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate the counting bounds for one n.
    BoundsReport {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long)]
        triples: Option<PathBuf>,
    },
    /// Sweep query-set constants and measure decoding success.
    Bench {
        #[arg(long = "n-list")]
        n_list: String,
        #[arg(long = "c-list")]
        c_list: String,
        #[arg(long)]
        trials: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: i32,
    kind: String,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_USAGE,
            kind: "Usage".into(),
            message: message.into(),
        }
    }
}

impl From<pmm_core::Error> for Failure {
    fn from(e: pmm_core::Error) -> Self {
        let code = match e {
            pmm_core::Error::CutoffExceeded { .. } => EXIT_CUTOFF,
            _ => EXIT_USAGE,
        };
        Failure {
            code,
            kind: e.kind().into(),
            message: e.to_string(),
        }
    }
}

fn file_error(path: &Path, e: FormatError) -> Failure {
    match e {
        FormatError::Core(core) => core.into(),
        FormatError::Parse(p) => Failure {
            code: EXIT_USAGE,
            kind: "ParseError".into(),
            message: format!("{}: {p}", path.display()),
        },
        FormatError::Io(io) => Failure {
            code: EXIT_USAGE,
            kind: "Io".into(),
            message: format!("{}: {io}", path.display()),
        },
    }
}

fn io_failure(what: &str, e: std::io::Error) -> Failure {
    Failure {
        code: EXIT_USAGE,
        kind: "Io".into(),
        message: format!("{what}: {e}"),
    }
}

/// Parses a `PMM_CUTOFF` value.
pub fn parse_cutoffs(value: Option<&str>) -> Result<Cutoffs, String> {
    let Some(value) = value else {
        return Ok(Cutoffs::default());
    };
    let num = |s: &str| {
        s.trim()
            .parse::<usize>()
            .map_err(|_| format!("{CUTOFF_ENV}={value:?} is not `N` or `E,T`"))
    };
    match value.split_once(',') {
        None => {
            let n = num(value)?;
            Ok(Cutoffs::new(n, n))
        }
        Some((e, t)) => Ok(Cutoffs::new(num(e)?, num(t)?)),
    }
}

fn open_query_set(path: &Path) -> Result<QuerySet, Failure> {
    let file = File::open(path).map_err(|e| io_failure(&path.display().to_string(), e))?;
    read_query_set(BufReader::new(file)).map_err(|e| file_error(path, e))
}

fn with_output(
    path: Option<&Path>,
    stdout: &mut dyn Write,
    f: impl FnOnce(&mut dyn Write) -> Result<(), Failure>,
) -> Result<(), Failure> {
    match path {
        None => f(stdout),
        Some(p) => {
            let file = File::create(p).map_err(|e| io_failure(&p.display().to_string(), e))?;
            let mut w = BufWriter::new(file);
            f(&mut w)?;
            w.flush().map_err(|e| io_failure(&p.display().to_string(), e))
        }
    }
}

fn parse_levels(text: &str) -> Result<Vec<Level>, Failure> {
    if text == "all" {
        return Ok(Level::ALL.to_vec());
    }
    let mut levels = Vec::new();
    for name in text.split(',') {
        let level = Level::from_name(name.trim())
            .ok_or_else(|| Failure::usage(format!("unknown level {name:?}")))?;
        if !levels.contains(&level) {
            levels.push(level);
        }
    }
    Ok(levels)
}

fn parse_list<T>(text: &str, parse: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, Failure> {
    let items = text
        .split(',')
        .map(|s| parse(s.trim()).map_err(Failure::usage))
        .collect::<Result<Vec<_>, _>>()?;
    if items.is_empty() {
        return Err(Failure::usage("empty list"));
    }
    Ok(items)
}

fn execute(cli: Cli, cutoffs: &Cutoffs, stdout: &mut dyn Write) -> Result<i32, Failure> {
    let out_err = |e: std::io::Error| io_failure("stdout", e);
    match cli.command {
        Command::Gen {
            n,
            count,
            seed,
            output,
        } => {
            let count = if count == "auto" {
                QueryCount::Auto
            } else {
                QueryCount::Exact(
                    count
                        .parse()
                        .map_err(|_| Failure::usage(format!("--count {count:?} is not a number or `auto`")))?,
                )
            };
            let q = generate_query_set(n, count, seed)?;
            with_output(output.as_deref(), stdout, |w| {
                write_query_set(&q, w).map_err(|e| file_error(Path::new("output"), e))
            })?;
            Ok(EXIT_OK)
        }
        Command::Answer {
            queries,
            codeword,
            output,
        } => {
            let q = open_query_set(&queries)?;
            let codeword = parse_permutation(&codeword, None).map_err(|m| Failure {
                code: EXIT_USAGE,
                kind: "NotABijection".into(),
                message: format!("--codeword: {m}"),
            })?;
            let fb = answer_all(&q, &codeword)?;
            with_output(output.as_deref(), stdout, |w| {
                write_feedback(&fb, w).map_err(|e| file_error(Path::new("output"), e))
            })?;
            Ok(EXIT_OK)
        }
        Command::Decode { queries, feedback } => {
            let q = open_query_set(&queries)?;
            let file = File::open(&feedback).map_err(|e| io_failure(&feedback.display().to_string(), e))?;
            let fb = read_feedback(BufReader::new(file)).map_err(|e| file_error(&feedback, e))?;
            let tr = decode(&q, &fb)?;
            stdout
                .write_all(format_transcript(&tr).as_bytes())
                .map_err(out_err)?;
            match tr.outcome {
                DecodeOutcome::Success(_) => Ok(EXIT_OK),
                DecodeOutcome::Stuck { remaining, .. } => Err(Failure {
                    code: EXIT_STUCK,
                    kind: "Stuck".into(),
                    message: format!("{} positions unresolved", remaining.len()),
                }),
            }
        }
        Command::Certify {
            queries,
            level,
            exhaustive: _,
            mc,
            seed,
        } => {
            let q = open_query_set(&queries)?;
            let levels = parse_levels(&level)?;
            let mode = match mc {
                Some(trials) => Mode::MonteCarlo {
                    trials,
                    seed: seed.expect("clap enforces --seed with --mc"),
                },
                None => Mode::Exhaustive,
            };
            let mut certs: Vec<Certificate> = Vec::new();
            for (i, &level) in levels.iter().enumerate() {
                let cert = parallel::certify(&q, level, mode, cutoffs)?;
                if i > 0 {
                    writeln!(stdout).map_err(out_err)?;
                }
                stdout
                    .write_all(format_certificate(&cert, &q).as_bytes())
                    .map_err(out_err)?;
                if !verify_witness(&q, &cert)? {
                    return Err(Failure {
                        code: EXIT_USAGE,
                        kind: "InvalidWitness".into(),
                        message: format!("{level} witness failed its re-check"),
                    });
                }
                certs.push(cert);
            }
            if certs.len() > 1 && mode == Mode::Exhaustive {
                match check_hierarchy(&certs) {
                    Ok(()) => writeln!(stdout, "\nhierarchy=ok").map_err(out_err)?,
                    Err(v) => {
                        return Err(Failure {
                            code: EXIT_USAGE,
                            kind: "HierarchyViolation".into(),
                            message: format!("{} passed but {} failed", v.passed, v.failed),
                        })
                    }
                }
            }
            match certs.iter().find(|c| !c.passed()) {
                None => Ok(EXIT_OK),
                Some(c) => Err(Failure {
                    code: EXIT_FAIL,
                    kind: "CertificateFail".into(),
                    message: format!("{} FAIL", c.level),
                }),
            }
        }
        Command::BoundsReport { n, m, triples } => {
            if n == 0 {
                return Err(Failure::usage("--n must be at least 1"));
            }
            let triples = match triples {
                None => Vec::new(),
                Some(path) => {
                    let file = File::open(&path).map_err(|e| io_failure(&path.display().to_string(), e))?;
                    let (tn, ts) = read_triples(BufReader::new(file)).map_err(|e| file_error(&path, e))?;
                    if tn != n {
                        return Err(pmm_core::Error::SizeMismatch { left: n, right: tn }.into());
                    }
                    ts
                }
            };
            let report = format_bounds_report(n, m, &triples, cutoffs)?;
            stdout.write_all(report.as_bytes()).map_err(out_err)?;
            Ok(EXIT_OK)
        }
        Command::Bench {
            n_list,
            c_list,
            trials,
            seed,
            output,
        } => {
            let ns = parse_list(&n_list, |s| {
                s.parse::<usize>()
                    .map_err(|_| format!("--n-list: {s:?} is not a number"))
            })?;
            let cs: Vec<(String, BigRational)> =
                parse_list(&c_list, |s| Ok((s.to_string(), parse_constant(s)?)))?;
            let rows = run_bench(&ns, &cs, trials, seed)?;
            with_output(output.as_deref(), stdout, |w| {
                write_csv(&rows, w).map_err(|e| io_failure("csv", e))
            })?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs the CLI with explicit streams and environment; returns the exit code.
pub fn run_with<I, T>(args: I, cutoff_env: Option<&str>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return EXIT_OK;
            }
            let first = e.to_string();
            let first = first.lines().next().unwrap_or("invalid arguments");
            let first = first.strip_prefix("error: ").unwrap_or(first);
            let _ = writeln!(stderr, "error[Usage]: {first}");
            return EXIT_USAGE;
        }
    };
    let result = parse_cutoffs(cutoff_env)
        .map_err(Failure::usage)
        .and_then(|cutoffs| execute(cli, &cutoffs, stdout));
    let _ = stdout.flush();
    match result {
        Ok(code) => code,
        Err(f) => {
            let message = f.message.replace('\n', " ");
            let _ = writeln!(stderr, "error[{}]: {}", f.kind, message);
            f.code
        }
    }
}

/// Entry point for the binary: real argv, environment and streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let env = std::env::var(CUTOFF_ENV).ok();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, env.as_deref(), &mut stdout.lock(), &mut stderr.lock())
}
