use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use blockfree::ats::{length_lex, Budget};
use blockfree::epda::State;
use blockfree::io::dot::{epda_to_dot, machine_to_dot};
use blockfree::io::{parse_epda, write_epda, Names};
use blockfree::oracle::{self, render_word, Bounds};
use blockfree::pipeline::{run_pipeline, Artifact, Options, PipelineRun};
use blockfree::reach;
use blockfree::{BoundedLanguage, Epda, Error};

#[derive(Parser)]
#[command(
    name = "blockfree",
    version,
    about = "Make deterministic pushdown automata accessible, deadlock-free, lifelock-free and blockfree"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Report format on stdout.
    #[arg(long, global = true, value_enum, default_value = "text")]
    report: Format,
    /// Accept names with the reserved `~` prefix.
    #[arg(long, global = true)]
    lenient: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Args, Clone, Copy)]
struct BoundArgs {
    /// Longest word compared.
    #[arg(long, default_value_t = 8)]
    maxlen: usize,
    /// Exploration depth in steps.
    #[arg(long, default_value_t = 40)]
    depth: usize,
    /// Symbols a marking continuation may generate.
    #[arg(long, default_value_t = 40)]
    horizon: usize,
    #[arg(long, default_value_t = 100_000)]
    max_configs: usize,
}

impl BoundArgs {
    fn bounds(&self) -> Bounds {
        Bounds {
            n: self.maxlen,
            depth: self.depth,
            horizon: self.horizon,
            max_configs: self.max_configs,
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Run all twelve steps.
    Run {
        #[arg(long, short)]
        input: PathBuf,
        /// Write the result here instead of stdout.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Prefix length for pruning.
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long)]
        no_prune: bool,
        /// Write every intermediate artifact into this directory.
        #[arg(long)]
        emit_intermediates: Option<PathBuf>,
        /// Check the result against the input afterwards.
        #[arg(long)]
        verify: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Print the artifact after step N (0 to 12).
    Step {
        n: usize,
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Bounded property checks. Without property flags all are run.
    Check {
        #[arg(long, short)]
        input: PathBuf,
        /// The original automaton; adds the marked-language comparison.
        #[arg(long)]
        against: Option<PathBuf>,
        #[arg(long)]
        deadlock: bool,
        #[arg(long)]
        lifelock: bool,
        #[arg(long)]
        blockfree: bool,
        #[arg(long)]
        deterministic: bool,
        #[arg(long)]
        accessible: bool,
        #[command(flatten)]
        bounds: BoundArgs,
    },
    /// Print the words of length at most maxlen.
    Lang {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 6)]
        maxlen: usize,
        #[arg(long, conflicts_with = "unmarked")]
        marked: bool,
        #[arg(long)]
        unmarked: bool,
    },
    /// Compare two automata up to maxlen.
    Equiv {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value_t = 8)]
        maxlen: usize,
        #[arg(long)]
        unmarked: bool,
    },
    /// Stack prefixes with which each state may be reached.
    Reach {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
    },
    /// Graphviz rendering of an automaton, or of the machine with `--step 6`.
    Dot {
        #[arg(long, short)]
        input: PathBuf,
        #[arg(long)]
        step: Option<usize>,
    },
}

enum Failure {
    Input(String),
    Violation(String),
    Subclass(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. } | Error::InvalidConfig(_) => Failure::Input(e.to_string()),
            Error::Subclass(_) | Error::Precondition(_) | Error::MarkerCollision(_) => Failure::Subclass(e.to_string()),
            _ => Failure::Violation(e.to_string()),
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Input(format!("{}: {}", path.display(), e))
}

fn load(path: &Path, lenient: bool) -> Result<Epda, Failure> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let names = if lenient { Names::Lenient } else { Names::Strict };
    let a = parse_epda(&text, names).map_err(|e| io_err(path, e))?;
    if let Some(v) = a.validate().first() {
        return Err(io_err(path, v));
    }
    Ok(a)
}

fn emit<T: Serialize>(format: Format, value: &T, text: String) {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(value).unwrap()),
        Format::Text => print!("{}", text),
    }
}

fn extension(a: &Artifact) -> &'static str {
    match a {
        Artifact::Epda(_) => "epda",
        Artifact::Cfg(_) => "cfg",
        Artifact::Machine(..) => "lr",
        Artifact::Parser(_) => "parser",
    }
}

fn write_intermediates(dir: &Path, run: &PipelineRun) -> Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    for s in &run.stages {
        let path = dir.join(format!("step{:02}.{}", s.step, extension(&s.artifact)));
        fs::write(&path, s.artifact.to_string()).map_err(|e| io_err(&path, e))?;
    }
    Ok(())
}

#[derive(Serialize)]
struct StageJson {
    step: usize,
    name: &'static str,
    kind: &'static str,
    size: usize,
    millis: f64,
    pruned_states: usize,
    pruned_edges: usize,
}

#[derive(Serialize)]
struct RunJson {
    ok: bool,
    error: Option<String>,
    stages: Vec<StageJson>,
    verify: Option<oracle::Report>,
}

#[derive(Serialize)]
struct CheckJson {
    name: &'static str,
    passed: bool,
    detail: String,
    complete: bool,
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.cmd {
        Cmd::Run {
            input,
            output,
            k,
            no_prune,
            emit_intermediates,
            verify,
            bounds,
        } => {
            let m0 = load(input, cli.lenient)?;
            let opts = Options {
                k: (!no_prune).then_some(*k),
                ..Options::default()
            };
            let r = run_pipeline(&m0, opts);
            if cli.report == Format::Text {
                eprint!("{}", r.summary());
            }
            if let Some(dir) = emit_intermediates {
                write_intermediates(dir, &r)?;
            }
            let report = match (r.output(), verify) {
                (Ok(m), true) => Some(oracle::verify_solution(&m0, m, bounds.bounds())?),
                _ => None,
            };
            if cli.report == Format::Json {
                let json = RunJson {
                    ok: r.aborted.is_none() && report.as_ref().is_none_or(|r| r.passed()),
                    error: r.aborted.as_ref().map(|e| e.to_string()),
                    stages: r
                        .stages
                        .iter()
                        .map(|s| StageJson {
                            step: s.step,
                            name: s.name(),
                            kind: s.artifact.kind(),
                            size: s.artifact.size(),
                            millis: s.elapsed.as_secs_f64() * 1e3,
                            pruned_states: s.pruned.as_ref().map_or(0, |p| p.removed_states.len()),
                            pruned_edges: s.pruned.as_ref().map_or(0, |p| p.removed_edges.len()),
                        })
                        .collect(),
                    verify: report.clone(),
                };
                println!("{}", serde_json::to_string_pretty(&json).unwrap());
            }
            let m = r.output()?;
            let text = write_epda(m);
            match output {
                Some(path) => fs::write(path, text).map_err(|e| io_err(path, e))?,
                None if cli.report == Format::Text => print!("{}", text),
                None => {}
            }
            if let Some(rep) = report {
                if cli.report == Format::Text {
                    eprint!("{}", rep.render());
                }
                if !rep.passed() {
                    return Err(Failure::Violation("verification failed".into()));
                }
            }
            Ok(())
        }
        Cmd::Step { n, input, k } => {
            let m0 = load(input, cli.lenient)?;
            if *n > 12 {
                return Err(Failure::Input(format!("no step {}", n)));
            }
            let r = run_pipeline(
                &m0,
                Options {
                    k: Some(*k),
                    last: *n,
                    ..Options::default()
                },
            );
            if let Some(e) = r.aborted {
                return Err(e.into());
            }
            print!("{}", r.stage(*n).unwrap().artifact);
            Ok(())
        }
        Cmd::Check {
            input,
            against,
            deadlock,
            lifelock,
            blockfree,
            deterministic,
            accessible,
            bounds,
        } => {
            let m = load(input, true)?;
            let b = bounds.bounds();
            let all = !(*deadlock || *lifelock || *blockfree || *deterministic || *accessible);
            let report = match against {
                Some(orig) => oracle::verify_solution(&load(orig, cli.lenient)?, &m, b)?,
                None => oracle::verify_solution(&m, &m, b)?,
            };
            let wanted = |name: &str| match name {
                "marked-language" => against.is_some(),
                "accessible" => all || *accessible,
                "deadlock-free" => all || *deadlock,
                "lifelock-free" => all || *lifelock,
                "blockfree" => all || *blockfree,
                _ => false,
            };
            let mut items: Vec<CheckJson> = report
                .items
                .iter()
                .filter(|i| wanted(i.name))
                .map(|i| CheckJson {
                    name: i.name,
                    passed: i.passed,
                    detail: i.detail.clone(),
                    complete: i.complete,
                })
                .collect();
            if all || *deterministic {
                let det = oracle::determinism_bounded(&m.system(), b.depth, Budget::new(b.depth, b.max_configs));
                items.push(CheckJson {
                    name: "deterministic",
                    passed: det.is_clean(),
                    detail: match &det.found {
                        None => format!("no conflicting steps within depth {}", b.depth),
                        Some(v) => format!(
                            "edges {} and {} after {} steps",
                            v.edges.0,
                            v.edges.1,
                            v.derivation.len()
                        ),
                    },
                    complete: det.complete,
                });
            }
            let text: String = items
                .iter()
                .map(|i| format!("{:<16} {}  {}\n", i.name, if i.passed { "ok" } else { "FAIL" }, i.detail))
                .collect();
            emit(cli.report, &items, text);
            if items.iter().all(|i| i.passed) {
                Ok(())
            } else {
                Err(Failure::Violation("check failed".into()))
            }
        }
        Cmd::Lang {
            input,
            maxlen,
            marked: _,
            unmarked,
        } => {
            let m = load(input, cli.lenient)?;
            let l = m.bounded_language(!unmarked, *maxlen, Budget::default());
            let mut words: Vec<_> = l.words.into_iter().collect();
            words.sort_by(length_lex);
            let text: String = words.iter().map(|w| format!("{}\n", render_word(w))).collect();
            emit(cli.report, &words, text);
            if l.complete {
                Ok(())
            } else {
                Err(Failure::Violation("enumeration hit the budget".into()))
            }
        }
        Cmd::Equiv { a, b, maxlen, unmarked } => {
            let (a, b) = (load(a, cli.lenient)?, load(b, cli.lenient)?);
            let diff = oracle::languages_equal_upto(&a, &b, *maxlen, !unmarked, Budget::default())?;
            let text = match &diff {
                None => format!("equal up to length {}\n", maxlen),
                Some(w) => format!("differ on {}\n", render_word(w)),
            };
            emit(cli.report, &diff, text);
            match diff {
                None => Ok(()),
                Some(_) => Err(Failure::Violation("languages differ".into())),
            }
        }
        Cmd::Reach { input, k } => {
            let m = load(input, cli.lenient)?;
            let r = reach::k_prefix_overapprox(&m, *k)?;
            let mut map = std::collections::BTreeMap::new();
            let mut text = String::new();
            for (i, s) in m.states.iter().enumerate() {
                let ws: Vec<String> = r
                    .from_initial(State(i as u32))
                    .iter()
                    .map(|w| reach::render_word(&m, w))
                    .collect();
                text.push_str(&format!("{}: {}\n", s, if ws.is_empty() { "-".into() } else { ws.join(" ") }));
                map.insert(s.clone(), ws);
            }
            emit(cli.report, &map, text);
            Ok(())
        }
        Cmd::Dot { input, step } => {
            let m0 = load(input, cli.lenient)?;
            let Some(n) = step else {
                print!("{}", epda_to_dot(&m0));
                return Ok(());
            };
            let r = run_pipeline(
                &m0,
                Options {
                    last: *n,
                    ..Options::default()
                },
            );
            if let Some(e) = r.aborted {
                return Err(e.into());
            }
            match r.stage(*n).map(|s| &s.artifact) {
                Some(Artifact::Epda(a)) => print!("{}", epda_to_dot(a)),
                Some(Artifact::Machine(g, m)) => print!("{}", machine_to_dot(g, m)),
                _ => return Err(Failure::Input(format!("step {} has no graph rendering", n))),
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let (code, msg) = match f {
                Failure::Violation(m) => (1, m),
                Failure::Input(m) => (2, m),
                Failure::Subclass(m) => (3, m),
            };
            eprintln!("error: {}", msg);
            ExitCode::from(code)
        }
    }
}
