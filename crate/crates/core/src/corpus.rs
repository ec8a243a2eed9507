//! Example automata: the running example, a few crafted instances and a
//! seeded generator of small deterministic automata.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::ats::{language, Budget};
use crate::epda::{Epda, BOTTOM_NAME};

const B: &str = BOTTOM_NAME;

/// Reads `a^n b` and then alternates `b`/`d`, with an output-free loop in
/// `p2` that is never left and a dead end in `p4`.
pub fn running_example() -> Epda {
    let mut a = Epda::new("p0");
    a.add_edge("p0", Some("a"), &[B], &["x", B], "p0");
    a.add_edge("p0", Some("a"), &["x"], &["x", "x"], "p0");
    a.add_edge("p0", Some("b"), &[B], &[B], "p1");
    a.add_edge("p0", Some("b"), &["x"], &["x"], "p1");
    a.add_edge("p1", Some("b"), &["x"], &[], "p2");
    a.add_edge("p1", None, &[B], &[B], "p3");
    a.add_edge("p2", Some("d"), &["x"], &[], "p1");
    a.add_edge("p2", None, &[B], &[B], "p2");
    a.add_edge("p3", None, &[B], &[B], "p1");
    a.add_edge("p3", Some("d"), &["x"], &["x"], "p4");
    a.set_marking(&["p3"]);
    a
}

/// The marking state is unreachable.
pub fn empty_language() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &["x", B], "p");
    a.add_edge("p", Some("a"), &["x"], &["x", "x"], "p");
    a.add_edge("q", Some("b"), &[B], &[B], "f");
    a.set_marking(&["f"]);
    a
}

/// `a^n b^n` for `n >= 1`.
pub fn anbn() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &["x", B], "p");
    a.add_edge("p", Some("a"), &["x"], &["x", "x"], "p");
    a.add_edge("p", Some("b"), &["x"], &[], "q");
    a.add_edge("q", Some("b"), &["x"], &[], "q");
    a.add_edge("q", None, &[B], &[B], "f");
    a.set_marking(&["f"]);
    a
}

/// Balanced brackets.
pub fn dyck() -> Epda {
    let mut a = Epda::new("f");
    a.add_edge("f", Some("("), &[B], &["x", B], "p");
    a.add_edge("p", Some("("), &["x"], &["x", "x"], "p");
    a.add_edge("p", Some(")"), &["x"], &[], "p");
    a.add_edge("p", None, &[B], &[B], "f");
    a.set_marking(&["f"]);
    a
}

/// Two marking states joined by an ε-edge.
pub fn double_marking() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", None, &[B], &[B], "q");
    a.add_edge("q", Some("a"), &[B], &[B], "p");
    a.set_marking(&["p", "q"]);
    a
}

/// A branch that can never reach marking.
pub fn dead_branch() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &["x", B], "dead");
    a.add_edge("dead", Some("a"), &["x"], &["x", "x"], "dead");
    a.add_edge("p", Some("b"), &[B], &[B], "f");
    a.add_edge("f", Some("b"), &[B], &[B], "f");
    a.set_marking(&["f"]);
    a
}

/// Long pushes popped again by ε-edges and a generating edge in between.
pub fn long_push() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &["x", "y", "x", B], "q");
    a.add_edge("q", None, &["x"], &[], "r");
    a.add_edge("r", Some("b"), &["y"], &[], "q");
    a.add_edge("r", None, &[B], &[B], "f");
    a.add_edge("f", Some("a"), &[B], &[B], "p");
    a.set_marking(&["f"]);
    a
}

/// Edges that neither push nor pop but rewrite the top.
pub fn rewriting() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &["x", B], "p");
    a.add_edge("p", Some("b"), &["x"], &["y"], "p");
    a.add_edge("p", None, &["y"], &["x"], "q");
    a.add_edge("q", Some("c"), &["x"], &[], "p");
    a.set_marking(&["p"]);
    a
}

/// Marking only after an output-free cycle of pushes and pops.
pub fn epsilon_cycle() -> Epda {
    let mut a = Epda::new("p");
    a.add_edge("p", Some("a"), &[B], &[B], "q");
    a.add_edge("q", None, &[B], &["x", B], "r");
    a.add_edge("r", None, &["x"], &[], "s");
    a.add_edge("s", Some("b"), &[B], &[B], "f");
    a.add_edge("f", Some("a"), &[B], &[B], "q");
    a.set_marking(&["f", "p"]);
    a
}

pub fn crafted() -> Vec<(String, Epda)> {
    vec![
        ("running".into(), running_example()),
        ("anbn".into(), anbn()),
        ("dyck".into(), dyck()),
        ("double-marking".into(), double_marking()),
        ("dead-branch".into(), dead_branch()),
        ("long-push".into(), long_push()),
        ("rewriting".into(), rewriting()),
        ("epsilon-cycle".into(), epsilon_cycle()),
    ]
}

/// Shape of generated automata.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GenParams {
    pub states: usize,
    /// Including the end-of-stack marker.
    pub stack: usize,
    pub outputs: usize,
    /// Longest pushed word, not counting a restored end-of-stack marker.
    pub max_push: usize,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            states: 4,
            stack: 3,
            outputs: 2,
            max_push: 2,
        }
    }
}

/// A random automaton that is deterministic by construction: for every
/// state and stack top there is either one ε-edge or generating edges with
/// distinct labels.
pub fn random_dpda(seed: u64, params: GenParams) -> Epda {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let states: Vec<String> = (0..params.states).map(|i| format!("s{}", i)).collect();
    let syms: Vec<String> = (1..params.stack).map(|i| format!("g{}", i)).collect();
    let outs: Vec<String> = (0..params.outputs).map(|i| ((b'a' + i as u8) as char).to_string()).collect();
    let mut a = Epda::new(&states[0]);
    for s in &states {
        a.add_state(s);
    }
    for s in &syms {
        a.add_stack_sym(s);
    }
    for o in &outs {
        a.add_output(o);
    }
    let tops: Vec<&str> = std::iter::once(B).chain(syms.iter().map(|s| s.as_str())).collect();
    for p in &states {
        for &top in &tops {
            let roll: f64 = rng.random();
            let labels: Vec<Option<&str>> = if roll < 0.2 {
                vec![]
            } else if roll < 0.4 {
                vec![None]
            } else {
                outs.iter()
                    .filter(|_| rng.random_bool(0.6))
                    .map(|o| Some(o.as_str()))
                    .collect()
            };
            for l in labels {
                let len = rng.random_range(0..=params.max_push);
                let mut push: Vec<&str> = (0..len)
                    .map(|_| syms.choose(&mut rng).map_or(top, |s| s.as_str()))
                    .collect();
                if top == B {
                    push.retain(|s| *s != B);
                    push.push(B);
                }
                let dst = states.choose(&mut rng).unwrap();
                a.add_edge(p, l, &[top], &push, dst);
            }
        }
    }
    let marking: Vec<&str> = states
        .iter()
        .filter(|_| rng.random_bool(0.35))
        .map(|s| s.as_str())
        .collect();
    a.set_marking(&marking);
    a
}

/// Generated automata whose marked language up to length `n` is nonempty
/// and enumerable within the default budget.
pub fn random_instances(seed: u64, count: usize, params: GenParams, n: usize) -> Vec<(String, Epda)> {
    let mut out = Vec::new();
    let mut s = seed;
    while out.len() < count {
        let a = random_dpda(s, params);
        let l = language(&a.system(), true, n, Budget::default());
        if l.complete && !l.words.is_empty() {
            out.push((format!("random-{}", s), a));
        }
        s += 1;
    }
    out
}

/// The crafted instances followed by generated ones, at least `min` in
/// total.
pub fn corpus(min: usize) -> Vec<(String, Epda)> {
    let mut out = crafted();
    let missing = min.saturating_sub(out.len());
    out.extend(random_instances(1, missing, GenParams::default(), 8));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn crafted_are_dpdas() {
        for (name, a) in crafted() {
            a.check_valid().unwrap();
            assert!(a.classify().is_dpda(), "{}", name);
        }
        assert!(empty_language().classify().is_dpda());
    }

    #[test]
    fn generator_is_seeded_and_deterministic() {
        let p = GenParams::default();
        assert_eq!(random_dpda(7, p), random_dpda(7, p));
        for s in 0..50 {
            let a = random_dpda(s, p);
            a.check_valid().unwrap();
            assert!(a.classify().is_dpda());
        }
    }

    #[test]
    fn corpus_size() {
        assert!(corpus(20).len() >= 20);
    }
}
