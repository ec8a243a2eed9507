//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits
//! with a failure status if any criterion fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use blockfree::ats::{explore_with, prefix_closure, Mode};
use blockfree::cfg::{augment, Symbol};
use blockfree::corpus;
use blockfree::epda::Origin;
use blockfree::io::{parse_epda, Names};
use blockfree::lr::{build_lr_machine, detect_conflicts, ConflictKind};
use blockfree::oracle::{
    accessibility_bounded, blockfree_bounded, determinism_bounded, double_marking_bounded, has_lifelock_bounded,
    verify_solution, Bounds,
};
use blockfree::pipeline::{run_pipeline, Options, PipelineRun};
use blockfree::reach::{k_prefix_overapprox, kprefix, prune_obvious};
use blockfree::{Ats, BoundedLanguage, Budget, Cfg, Epda, Error, LrParser, Word};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> Epda {
    let text = std::fs::read_to_string(fixture(name)).unwrap();
    parse_epda(&text, Names::Strict).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Run {
    name: String,
    input: Epda,
    run: PipelineRun,
}

fn corpus_runs() -> &'static (Vec<Run>, Duration) {
    static RUNS: OnceLock<(Vec<Run>, Duration)> = OnceLock::new();
    RUNS.get_or_init(|| {
        let t = Instant::now();
        let runs = corpus::corpus(20)
            .into_iter()
            .map(|(name, input)| {
                let run = run_pipeline(&input, Options::default());
                Run { name, input, run }
            })
            .collect();
        (runs, t.elapsed())
    })
}

fn completed(r: &Run) -> Result<(), String> {
    match &r.run.aborted {
        None => Ok(()),
        Some(e) => Err(format!("{}: pipeline aborted: {}", r.name, e)),
    }
}

fn words(x: &dyn BoundedLanguage, marked: bool, n: usize) -> Result<BTreeSet<Word>, String> {
    let l = x.bounded_language(marked, n, Budget::default());
    ensure(l.complete, || format!("enumeration up to {} hit the budget", n))?;
    Ok(l.words)
}

fn show(w: &BTreeSet<Word>) -> String {
    let mut v: Vec<String> = w.iter().take(6).map(|w| if w.is_empty() { "ε".into() } else { w.join(" ") }).collect();
    if w.len() > 6 {
        v.push("…".into());
    }
    format!("{{{}}}", v.join(", "))
}

fn same(what: &str, a: &BTreeSet<Word>, b: &BTreeSet<Word>) -> Result<(), String> {
    ensure(a == b, || {
        let only_a: BTreeSet<Word> = a.difference(b).cloned().collect();
        let only_b: BTreeSet<Word> = b.difference(a).cloned().collect();
        format!("{}: missing {} extra {}", what, show(&only_a), show(&only_b))
    })
}

/// Marked words of the augmented grammar with both end markers removed.
fn augmented_marked(g: &Cfg, n: usize) -> Result<BTreeSet<Word>, String> {
    let mut out = BTreeSet::new();
    for w in words(g, true, n + 2)? {
        let inner = match (w.first(), w.last()) {
            (Some(a), Some(b)) if w.len() >= 2 && a == "$eof" && b == "$eof" => &w[1..w.len() - 1],
            _ => return Err(format!("augmented word {:?} is not framed by end markers", w)),
        };
        ensure(!inner.iter().any(|s| s == "$eof"), || format!("inner end marker in {:?}", w))?;
        if inner.len() <= n {
            out.insert(inner.to_vec());
        }
    }
    Ok(out)
}

fn running_example_end_to_end() -> Outcome {
    let t = Instant::now();
    let m0 = load("running.epda");
    ensure(m0 == corpus::running_example(), || "fixture differs from the built-in example".into())?;
    let b = Budget::default();

    let target: BTreeSet<Word> = (0..=3)
        .map(|n| {
            let mut w: Word = vec!["a".into(); 2 * n];
            w.push("b".into());
            for _ in 0..n {
                w.push("b".into());
                w.push("d".into());
            }
            w
        })
        .filter(|w| w.len() <= 12)
        .collect();
    same("input language", &words(&m0, true, 12)?, &target)?;

    ensure(has_lifelock_bounded(&m0.system(), 60, b).found.is_some(), || "input has no lifelock".into())?;
    ensure(!blockfree_bounded(&m0.system(), 20, 20, b).all_ok(), || "input has no blocking branch".into())?;
    let acc = accessibility_bounded(&m0, 60, b);
    ensure(acc.unwitnessed_states.iter().any(|s| s == "p4"), || "p4 is reachable in the input".into())?;

    let run = run_pipeline(&m0, Options::default());
    let m12 = run.output().map_err(|e| e.to_string())?;
    let bounds = Bounds {
        n: 12,
        depth: 60,
        horizon: 40,
        ..Bounds::default()
    };
    let report = verify_solution(&m0, m12, bounds).map_err(|e| e.to_string())?;
    ensure(report.passed(), || report.render())?;
    ensure(report.items.len() == 5, || format!("{} items", report.items.len()))?;
    let elapsed = t.elapsed();
    ensure(elapsed < Duration::from_secs(60), || format!("took {:.1?}", elapsed))?;
    Ok(format!("{} states {} edges, 5/5 items, {:.2?}", m12.states.len(), m12.edges.len(), elapsed))
}

fn language_preservation() -> Outcome {
    const N: usize = 8;
    let t = Instant::now();
    let (runs, _) = corpus_runs();
    ensure(runs.len() >= 20, || format!("corpus has {} instances", runs.len()))?;
    for r in runs {
        ensure(r.input.states.len() <= 6 && r.input.stack.len() <= 3, || format!("{} is too large", r.name))?;
        completed(r)?;
        let run = &r.run;
        let ctx = |what: &str| format!("{} {}", r.name, what);

        let reference = words(&r.input, true, N)?;
        for step in [0, 1, 2, 10, 11, 12] {
            same(&ctx(&format!("marked M{}", step)), &words(run.epda(step).unwrap(), true, N)?, &reference)?;
        }
        for step in [3, 4] {
            same(&ctx(&format!("marked G{}", step)), &words(run.cfg(step).unwrap(), true, N)?, &reference)?;
        }
        same(&ctx("marked G5"), &augmented_marked(run.cfg(5).unwrap(), N)?, &reference)?;
        for step in [7, 8, 9] {
            same(&ctx(&format!("marked M{}", step)), &words(run.parser(step).unwrap(), true, N)?, &reference)?;
        }

        let early = words(&r.input, false, N)?;
        for step in [1, 2] {
            same(&ctx(&format!("unmarked M{}", step)), &words(run.epda(step).unwrap(), false, N)?, &early)?;
        }
        same(&ctx("unmarked G3"), &words(run.cfg(3).unwrap(), false, N)?, &early)?;

        let g4 = run.cfg(4).unwrap();
        let cut = &g4.first_k(N)[g4.start as usize];
        let cut: BTreeSet<Word> = cut
            .iter()
            .map(|w| w.iter().map(|t| g4.terminals[*t as usize].clone()).collect())
            .collect();
        let late = prefix_closure(&cut);
        same(&ctx("unmarked G4 vs prefixes of marked"), &words(g4, false, N)?, &late)?;
        for step in [7, 8, 9] {
            same(&ctx(&format!("unmarked M{}", step)), &words(run.parser(step).unwrap(), false, N)?, &late)?;
        }
        for step in [10, 11, 12] {
            same(&ctx(&format!("unmarked M{}", step)), &words(run.epda(step).unwrap(), false, N)?, &late)?;
        }
    }
    let elapsed = corpus_runs().1 + t.elapsed();
    ensure(elapsed < Duration::from_secs(600), || format!("took {:.1?}", elapsed))?;
    Ok(format!("{} instances, {:.2?}", runs.len(), elapsed))
}

fn lr_rejection() -> Outcome {
    let g = augment(&Cfg::build("S", &["a"], &[("S", "A"), ("S", "B"), ("A", "a"), ("B", "a")]))
        .map_err(|e| e.to_string())?;
    let m = build_lr_machine(&g).map_err(|e| e.to_string())?;
    let c = detect_conflicts(&g, &m);
    let rr = c.iter().filter(|c| c.kind == ConflictKind::ReduceReduce).count();
    ensure(rr > 0, || format!("conflicts: {:?}", c))?;
    Ok(format!("{} reduce/reduce: {}", rr, c[0]))
}

fn parser_structure() -> Outcome {
    let run = run_pipeline(&corpus::running_example(), Options::default());
    completed(&Run {
        name: "running".into(),
        input: corpus::running_example(),
        run: run.clone(),
    })?;
    let (g, m) = run.machine(6).unwrap();
    let p: &LrParser = run.parser(7).unwrap();
    let eof = p.eof.unwrap();
    let state = |i: u32| -> Result<usize, String> {
        p.stack[i as usize]
            .strip_prefix("~q")
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| format!("stack symbol {} is not a machine state", p.stack[i as usize]))
    };

    let terminal_edges: BTreeSet<(usize, u32, usize)> = m
        .edges
        .iter()
        .filter_map(|(&(q, x), &r)| match x {
            Symbol::T(a) => Some((q, a, r)),
            Symbol::N(_) => None,
        })
        .collect();
    let mut shifts = BTreeSet::new();
    let mut reduces = 0;
    for r in &p.rules {
        let src = state(r.pop[0])?;
        let eof_shift = r.out == Some(eof)
            && r.fixed == Some(eof)
            && r.pop.len() == 1
            && r.push.len() == 2
            && m.succ(src, Symbol::T(eof.0)) == Some(state(r.push[1])?);
        if p.is_shift(r) || eof_shift {
            ensure(r.pop.len() == 1 && r.push.len() == 2 && r.push[0] == r.pop[0], || p.render_rule(r))?;
            let e = (src, r.out.unwrap().0, state(r.push[1])?);
            ensure(terminal_edges.contains(&e), || format!("{} has no machine edge", p.render_rule(r)))?;
            ensure(shifts.insert(e), || format!("{} duplicates a shift", p.render_rule(r)))?;
            continue;
        }
        reduces += 1;
        ensure(r.push.len() == 2 && r.push[0] == r.pop[0] && r.fixed == r.out, || p.render_rule(r))?;
        let path: Vec<usize> = r.pop[1..].iter().map(|&s| state(s)).collect::<Result<_, _>>()?;
        let goto = state(r.push[1])?;
        let matched = g.productions.iter().any(|prod| {
            m.walk(src, &prod.rhs).as_deref() == Some(&path[..]) && m.succ(src, Symbol::N(prod.lhs)) == Some(goto)
        });
        ensure(matched, || format!("{} follows no production", p.render_rule(r)))?;
    }
    ensure(shifts == terminal_edges, || {
        format!("{} shift rules for {} terminal edges", shifts.len(), terminal_edges.len())
    })?;
    Ok(format!("{} shifts, {} reduces over {} machine states", shifts.len(), reduces, m.states.len()))
}

fn fixed_output_internalized() -> Outcome {
    let (runs, _) = corpus_runs();
    let mut seen = 0;
    for r in runs {
        completed(r)?;
        let sys = r.run.parser(9).unwrap().system();
        let ex = explore_with(&sys, Budget::new(50, Budget::default().max_configs), Mode::Quotient, |_| true);
        if let Some(c) = ex.configs.iter().find(|c| c.fixed.is_some()) {
            return Err(format!("{}: {:?}", r.name, c));
        }
        seen += ex.len();
    }
    Ok(format!("{} configurations over {} instances", seen, runs.len()))
}

fn single_marking() -> Outcome {
    let (runs, _) = corpus_runs();
    for r in runs {
        completed(r)?;
        let m2 = r.run.epda(2).unwrap();
        let d = double_marking_bounded(&m2.system(), 50, Budget::default());
        if let Some(d) = d.found {
            return Err(format!("{}: {:?}", r.name, d.last()));
        }
    }
    Ok(format!("{} instances", runs.len()))
}

fn reach_soundness() -> Outcome {
    let (runs, _) = corpus_runs();
    let mut checked = 0;
    for r in runs {
        completed(r)?;
        let mut automata = vec![("M0", &r.input)];
        for (step, label) in [(1, "M1"), (2, "M2"), (11, "M11"), (12, "M12")] {
            automata.push((label, r.run.epda(step).unwrap()));
        }
        for (label, a) in automata {
            let sys = a.system();
            let ex = explore_with(&sys, Budget::new(30, 20_000), Mode::Quotient, |_| true);
            let mut used = BTreeSet::new();
            for c in &ex.configs {
                for (e, _) in sys.successors(c) {
                    used.insert(e);
                }
            }
            for k in 0..=2 {
                let approx = k_prefix_overapprox(a, k).map_err(|e| e.to_string())?;
                for c in &ex.configs {
                    let w = kprefix(&c.stack_word(), k);
                    ensure(approx.from_initial(c.state).contains(&w), || {
                        format!("{} {} k={}: {:?} not covered", r.name, label, k, c)
                    })?;
                    checked += 1;
                }
                let (pruned, report) = prune_obvious(a, k).map_err(|e| e.to_string())?;
                for c in &ex.configs {
                    let s = a.state_name(c.state);
                    ensure(pruned.state(s).is_some(), || format!("{} {} k={}: pruned {}", r.name, label, k, s))?;
                }
                let kept: BTreeSet<usize> = report
                    .kept
                    .origins
                    .iter()
                    .filter_map(|o| match o {
                        Origin::Edge(i) => Some(*i),
                        _ => None,
                    })
                    .collect();
                ensure(used.is_subset(&kept), || format!("{} {} k={}: pruned a used edge", r.name, label, k))?;
            }
        }
    }
    let m0 = load("running.epda");
    let (p0, _) = prune_obvious(&m0, 0).map_err(|e| e.to_string())?;
    let (p1, r1) = prune_obvious(&m0, 1).map_err(|e| e.to_string())?;
    ensure(p0.state("p4").is_some(), || "k=0 pruned p4".into())?;
    ensure(p1.state("p4").is_none(), || "k=1 kept p4".into())?;
    Ok(format!(
        "{} prefix checks; k=1 removes {:?} and {} edges",
        checked,
        r1.removed_states,
        r1.removed_edges.len()
    ))
}

fn empty_language_abort() -> Outcome {
    let m = load("empty.epda");
    let run = run_pipeline(&m, Options::default());
    ensure(run.aborted == Some(Error::EmptyLanguage), || format!("aborted with {:?}", run.aborted))?;
    let last = run.stages.last().map(|s| s.step);
    ensure(last == Some(3), || format!("last completed step {:?}", last))?;
    let status = Command::new(env!("CARGO_BIN_EXE_blockfree"))
        .arg("run")
        .arg("--input")
        .arg(fixture("empty.epda"))
        .output()
        .map_err(|e| e.to_string())?;
    let code = status.status.code();
    ensure(code == Some(1), || format!("exit code {:?}", code))?;
    Ok("aborted at step 4, exit code 1".into())
}

fn determinism_preserved() -> Outcome {
    let (runs, _) = corpus_runs();
    let b = Budget::default();
    let mut artifacts = 0;
    for r in runs {
        completed(r)?;
        for step in [0, 1, 2, 10, 11, 12] {
            let d = determinism_bounded(&r.run.epda(step).unwrap().system(), 50, b);
            ensure(d.is_clean(), || format!("{} M{}: {:?}", r.name, step, d.found.map(|n| n.edges)))?;
            artifacts += 1;
        }
        for step in [7, 8, 9] {
            let d = determinism_bounded(&r.run.parser(step).unwrap().system(), 50, b);
            ensure(d.is_clean(), || format!("{} M{}: {:?}", r.name, step, d.found.map(|n| n.edges)))?;
            artifacts += 1;
        }
    }
    Ok(format!("{} artifacts", artifacts))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("running example end to end", running_example_end_to_end),
        ("per-step language preservation", language_preservation),
        ("LR rejection of an ambiguous grammar", lr_rejection),
        ("parser rules mirror machine edges", parser_structure),
        ("fixed output internalized", fixed_output_internalized),
        ("no double marking", single_marking),
        ("reachability approximation sound", reach_soundness),
        ("empty language aborts", empty_language_abort),
        ("determinism preserved", determinism_preserved),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|_| Err("panicked".into()));
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{}] {} {:<38} {:>9.2?}  {}", tag, i + 1, name, t.elapsed(), detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
