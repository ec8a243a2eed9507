use blockfree::cfg::StepThreeMode;
use blockfree::corpus;
use blockfree::epda::Origin;
use blockfree::oracle::{languages_equal_upto, verify_solution, Bounds};
use blockfree::pipeline::{run_pipeline, solve, Artifact, Options, STEP_NAMES};
use blockfree::{Budget, Epda, Error};

fn bounds() -> Bounds {
    Bounds {
        n: 8,
        depth: 30,
        horizon: 30,
        ..Bounds::default()
    }
}

#[test]
fn crafted_instances_are_solved() {
    for (name, m0) in corpus::crafted() {
        let m = solve(&m0).unwrap_or_else(|e| panic!("{}: {}", name, e));
        assert!(m.classify().is_dpda(), "{}", name);
        let report = verify_solution(&m0, &m, bounds()).unwrap();
        assert!(report.passed(), "{}\n{}", name, report.render());
    }
}

#[test]
fn every_stage_has_the_expected_kind() {
    let run = run_pipeline(&corpus::running_example(), Options::default());
    let kinds = [
        "automaton", "automaton", "automaton", "grammar", "grammar", "grammar", "machine", "parser", "parser",
        "parser", "automaton", "automaton", "automaton",
    ];
    for (s, kind) in run.stages.iter().zip(kinds) {
        assert_eq!(s.artifact.kind(), kind, "step {}", s.step);
        assert_eq!(s.name(), STEP_NAMES[s.step]);
    }
    assert!(run.summary().lines().count() >= 13);
}

#[test]
fn last_step_provenance_points_into_step_eleven() {
    let run = run_pipeline(&corpus::running_example(), Options::default());
    let m11 = run.epda(11).unwrap();
    let m12 = run.epda(12).unwrap();
    let prov = run.stage(12).unwrap().provenance.as_ref().unwrap();
    assert_eq!(prov.origins.len(), m12.edges.len());
    for (i, o) in prov.origins.iter().enumerate() {
        let Origin::Edge(j) = *o else { panic!("{:?}", o) };
        let (a, b) = (&m12.edges[i], &m11.edges[j]);
        assert_eq!(m12.render_edge(a), m11.render_edge(b));
    }
}

#[test]
fn options_do_not_change_the_language() {
    let m0 = corpus::running_example();
    let base = solve(&m0).unwrap();
    for opts in [
        Options {
            k: None,
            ..Options::default()
        },
        Options {
            k: Some(2),
            grammar_mode: StepThreeMode::Productive,
            ..Options::default()
        },
    ] {
        let run = run_pipeline(&m0, opts);
        let out = run.output().unwrap();
        let diff = languages_equal_upto(&base, out, 9, true, Budget::default()).unwrap();
        assert_eq!(diff, None, "{:?}", opts);
    }
}

#[test]
fn productive_mode_builds_a_smaller_grammar() {
    let m0 = corpus::running_example();
    let full = run_pipeline(&m0, Options::default());
    let lean = run_pipeline(
        &m0,
        Options {
            grammar_mode: StepThreeMode::Productive,
            ..Options::default()
        },
    );
    let size = |r: &blockfree::pipeline::PipelineRun| r.cfg(3).unwrap().productions.len();
    assert!(size(&lean) <= size(&full));
    assert_eq!(full.epda(12).unwrap().edges.len(), lean.epda(12).unwrap().edges.len());
}

#[test]
fn nondeterministic_input_is_rejected() {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &["$bot"], &["$bot"], "p");
    a.add_edge("p", None, &["$bot"], &["$bot"], "q");
    a.set_marking(&["q"]);
    let run = run_pipeline(&a, Options::default());
    assert!(matches!(run.aborted, Some(Error::Subclass(_))), "{:?}", run.aborted);
    assert!(run.stages.is_empty());
}

#[test]
fn empty_language_is_reported_after_the_grammar() {
    let run = run_pipeline(&corpus::empty_language(), Options::default());
    assert_eq!(run.aborted, Some(Error::EmptyLanguage));
    assert!(matches!(run.stage(3).unwrap().artifact, Artifact::Cfg(_)));
    assert!(run.stage(4).is_none());
}

#[test]
fn generated_instances_are_solved() {
    for (name, m0) in corpus::random_instances(100, 6, corpus::GenParams::default(), 6) {
        let m = solve(&m0).unwrap_or_else(|e| panic!("{}: {}", name, e));
        let report = verify_solution(&m0, &m, bounds()).unwrap();
        assert!(report.passed(), "{}\n{}", name, report.render());
    }
}
