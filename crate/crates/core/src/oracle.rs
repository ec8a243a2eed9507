//! Bounded brute-force checks of the properties the transformation claims:
//! determinism, deadlock and lifelock freedom, operational blockfreeness,
//! accessibility, absence of double marking and language equality.
//!
//! Every check explores configurations with histories erased (steps never
//! depend on them) and reports whether the exploration was exhaustive.
//! Witnesses are full derivations from the initial configuration.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use serde::Serialize;

use crate::ats::{appended, explore_with, length_lex, Ats, BoundedLanguage, Budget, Derivation, Mode, Word};
use crate::epda::{Epda, EpdaConfig, EpdaSystem, StackSym};
use crate::error::{Error, Result};
use crate::parser::ParserSystem;

/// Outcome of a bounded search: a witness if one was found, and whether the
/// search space was exhausted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bounded<T> {
    pub found: Option<T>,
    pub complete: bool,
}

impl<T> Bounded<T> {
    pub fn is_clean(&self) -> bool {
        self.found.is_none()
    }
}

/// Re-executes `edges` from the initial configuration.
pub fn replay<A: Ats>(ats: &A, edges: &[A::Edge]) -> Option<Derivation<A::Edge, A::Config>> {
    let mut d = Derivation::start(ats.initial_config());
    for e in edges {
        let next = ats
            .successors(d.last())
            .into_iter()
            .find(|(e2, _)| e2 == e)?;
        d.push(next.0, next.1);
    }
    Some(d)
}

fn edges_to<A: Ats>(ex: &crate::ats::Exploration<A::Edge, A::Config>, i: usize) -> Vec<A::Edge> {
    ex.derivation_to(i).edges().cloned().collect()
}

fn budget(depth: usize, b: Budget) -> Budget {
    Budget::new(depth, b.max_configs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Nondeterminism<E, C> {
    pub derivation: Derivation<E, C>,
    pub edges: (E, E),
}

/// Looks for a reachable configuration with two steps that append the same
/// symbol (or both append nothing).
pub fn determinism_bounded<A: Ats>(ats: &A, depth: usize, b: Budget) -> Bounded<Nondeterminism<A::Edge, A::Config>> {
    let ex = explore_with(ats, budget(depth, b), Mode::Quotient, |_| true);
    for (i, c) in ex.configs.iter().enumerate() {
        let succ = ats.successors(c);
        for (x, s1) in succ.iter().enumerate() {
            for s2 in &succ[x + 1..] {
                if !ats.distinguishable(c, s1, s2) {
                    let derivation = replay(ats, &edges_to::<A>(&ex, i)).expect("replayable");
                    return Bounded {
                        found: Some(Nondeterminism {
                            derivation,
                            edges: (s1.0.clone(), s2.0.clone()),
                        }),
                        complete: ex.complete,
                    };
                }
            }
        }
    }
    Bounded {
        found: None,
        complete: ex.complete,
    }
}

/// A derivation through non-marking configurations only, ending in a
/// configuration without successors.
pub fn has_deadlock_bounded<A: Ats>(ats: &A, depth: usize, b: Budget) -> Bounded<Derivation<A::Edge, A::Config>> {
    if ats.is_marking(&ats.initial_config()) {
        return Bounded {
            found: None,
            complete: true,
        };
    }
    let ex = explore_with(ats, budget(depth, b), Mode::Quotient, |c| !ats.is_marking(c));
    for (i, c) in ex.configs.iter().enumerate() {
        if ats.successors(c).is_empty() {
            return Bounded {
                found: replay(ats, &edges_to::<A>(&ex, i)),
                complete: ex.complete,
            };
        }
    }
    Bounded {
        found: None,
        complete: ex.complete,
    }
}

/// Stack-shaped systems, for the lifelock criterion.
pub trait StackAts: Ats {
    /// Stack contents, bottom first.
    fn stack_ids(&self, c: &Self::Config) -> Vec<u32>;
    /// Number of symbols an edge reads from the top of the stack.
    fn reads(&self, e: &Self::Edge) -> usize;
    /// Configuration data other than stack and history.
    fn control(&self, c: &Self::Config) -> (u32, Option<u32>);
}

impl StackAts for EpdaSystem<'_> {
    fn stack_ids(&self, c: &Self::Config) -> Vec<u32> {
        c.stack.iter().map(|g| g.0).collect()
    }

    fn reads(&self, e: &usize) -> usize {
        self.epda.edges[*e].pop.len()
    }

    fn control(&self, c: &Self::Config) -> (u32, Option<u32>) {
        (c.state.0, None)
    }
}

impl StackAts for ParserSystem<'_> {
    fn stack_ids(&self, c: &Self::Config) -> Vec<u32> {
        c.stack.clone()
    }

    fn reads(&self, e: &usize) -> usize {
        self.parser.rules[*e].pop.len()
    }

    fn control(&self, c: &Self::Config) -> (u32, Option<u32>) {
        (0, c.fixed.map(|s| s.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LifelockKind {
    /// The segment returns to the identical configuration.
    Repeat,
    /// The segment returns to the same top of stack with more below it.
    Grow,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lifelock<E, C> {
    /// Initial derivation; the output-free repeating segment starts at
    /// `segment_start`.
    pub derivation: Derivation<E, C>,
    pub segment_start: usize,
    pub kind: LifelockKind,
}

/// Searches for an output-free segment from a reachable configuration that
/// only reads the top `j` symbols `u` of its entry stack and ends in the same
/// control state with `u` again on top. Such a segment can be repeated
/// forever.
pub fn has_lifelock_bounded<A: StackAts>(ats: &A, depth: usize, b: Budget) -> Bounded<Lifelock<A::Edge, A::Config>> {
    let ex = explore_with(ats, budget(depth, b), Mode::Quotient, |_| true);
    for (i, root) in ex.configs.iter().enumerate() {
        if let Some((segment, kind)) = lifelock_from(ats, root, depth) {
            let mut edges = edges_to::<A>(&ex, i);
            let start = edges.len();
            edges.extend(segment);
            if let Some(derivation) = replay(ats, &edges) {
                return Bounded {
                    found: Some(Lifelock {
                        derivation,
                        segment_start: start,
                        kind,
                    }),
                    complete: ex.complete,
                };
            }
        }
    }
    Bounded {
        found: None,
        complete: ex.complete,
    }
}

fn lifelock_from<A: StackAts>(ats: &A, root: &A::Config, limit: usize) -> Option<(Vec<A::Edge>, LifelockKind)> {
    let s = ats.stack_ids(root);
    let ctrl = ats.control(root);
    let mut seen: HashSet<(A::Config, usize)> = HashSet::new();
    let mut stack: Vec<(A::Config, usize, Vec<A::Edge>)> = vec![(root.clone(), s.len(), vec![])];
    while let Some((c, t, path)) = stack.pop() {
        if !path.is_empty() && ats.control(&c) == ctrl {
            let e = ats.stack_ids(&c);
            let j = s.len() - t;
            if e.len() >= s.len() && e[e.len() - j..] == s[t..] && e[..t] == s[..t] {
                let kind = if e.len() == s.len() {
                    LifelockKind::Repeat
                } else {
                    LifelockKind::Grow
                };
                return Some((path, kind));
            }
        }
        if path.len() >= limit {
            continue;
        }
        let len = ats.stack_ids(&c).len();
        for (e, n) in ats.successors(&c) {
            if appended(ats, &c, &n).is_some() || ats.output_len(&n) > ats.output_len(&c) {
                continue;
            }
            let t2 = t.min(len.saturating_sub(ats.reads(&e)));
            let n = ats.forget_output(&n);
            if seen.insert((n.clone(), t2)) {
                let mut p2 = path.clone();
                p2.push(e);
                stack.push((n, t2, p2));
            }
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockfreeReport<C> {
    /// Configurations within the depth bound.
    pub checked: usize,
    /// Configurations with no marking continuation within the horizon.
    pub unknown: Vec<C>,
    pub complete: bool,
}

impl<C> BlockfreeReport<C> {
    pub fn all_ok(&self) -> bool {
        self.unknown.is_empty()
    }
}

/// For every configuration reachable within `depth` steps, looks for a
/// marking continuation generating at most `horizon` further symbols.
/// Output-free steps are free; the search is bounded by the configuration
/// budget instead.
pub fn blockfree_bounded<A: Ats>(ats: &A, depth: usize, horizon: usize, b: Budget) -> BlockfreeReport<A::Config> {
    let ex = explore_with(ats, budget(depth, b), Mode::Quotient, |_| true);
    let mut complete = ex.complete;
    // forward 0-1 search: cost is the number of generated symbols from the
    // nearest explored configuration
    let mut nodes: Vec<A::Config> = ex.configs.clone();
    let mut index: HashMap<A::Config, usize> = ex.index.clone();
    let mut cost: Vec<usize> = vec![0; nodes.len()];
    let mut done: Vec<bool> = vec![false; nodes.len()];
    let mut preds: Vec<Vec<(usize, usize)>> = vec![Vec::new(); nodes.len()];
    let mut queue: VecDeque<usize> = (0..nodes.len()).collect();
    while let Some(i) = queue.pop_front() {
        if done[i] {
            continue;
        }
        done[i] = true;
        let c = nodes[i].clone();
        for (_, s) in ats.successors(&c) {
            let g = usize::from(ats.output_len(&s) > ats.output_len(&c));
            let s = ats.forget_output(&s);
            let c2 = cost[i] + g;
            let j = match index.get(&s) {
                Some(&j) => j,
                None => {
                    if nodes.len() >= b.max_configs {
                        complete = false;
                        continue;
                    }
                    nodes.push(s.clone());
                    index.insert(s, nodes.len() - 1);
                    cost.push(usize::MAX);
                    done.push(false);
                    preds.push(Vec::new());
                    nodes.len() - 1
                }
            };
            preds[j].push((i, g));
            if c2 < cost[j] && c2 <= horizon {
                cost[j] = c2;
                if g == 0 {
                    queue.push_front(j);
                } else {
                    queue.push_back(j);
                }
            }
        }
    }
    // backward 0-1 search from marking configurations
    let mut dist: Vec<usize> = vec![usize::MAX; nodes.len()];
    let mut queue = VecDeque::new();
    for (i, c) in nodes.iter().enumerate() {
        if ats.is_marking(c) {
            dist[i] = 0;
            queue.push_back(i);
        }
    }
    let mut settled = vec![false; nodes.len()];
    while let Some(j) = queue.pop_front() {
        if settled[j] {
            continue;
        }
        settled[j] = true;
        for &(i, g) in &preds[j] {
            let d = dist[j] + g;
            if d < dist[i] && d <= horizon {
                dist[i] = d;
                if g == 0 {
                    queue.push_front(i);
                } else {
                    queue.push_back(i);
                }
            }
        }
    }
    BlockfreeReport {
        checked: ex.len(),
        unknown: (0..ex.len())
            .filter(|&i| dist[i] > horizon)
            .map(|i| ex.configs[i].clone())
            .collect(),
        complete,
    }
}

/// Configurations from which a marking configuration is reachable, as a
/// finite automaton over stacks read top-first (backward saturation).
#[derive(Debug, Clone)]
pub struct Coreach {
    /// `trans[node]` lists `(stack symbol, node)`; nodes are the states of
    /// the automaton followed by one accepting sink.
    trans: Vec<BTreeSet<(StackSym, usize)>>,
    sink: usize,
}

impl Coreach {
    /// `None` if some edge pops more than one symbol.
    pub fn new(a: &Epda) -> Option<Coreach> {
        if a.edges.iter().any(|e| e.pop.len() > 1) {
            return None;
        }
        let nq = a.states.len();
        let sink = nq;
        let all: Vec<StackSym> = (0..a.stack.len() as u32).map(StackSym).collect();
        let mut trans: Vec<BTreeSet<(StackSym, usize)>> = vec![BTreeSet::new(); nq + 1];
        for &g in &all {
            trans[sink].insert((g, sink));
            for q in &a.marking {
                trans[q.0 as usize].insert((g, sink));
            }
        }
        // (p, γ) -> (q, v) per edge, zero-pop edges once per stack symbol
        let mut rules: Vec<(usize, StackSym, usize, Vec<StackSym>)> = Vec::new();
        for e in &a.edges {
            match e.pop.first() {
                Some(&g) => rules.push((e.src.0 as usize, g, e.dst.0 as usize, e.push.clone())),
                None => {
                    for &g in &all {
                        let mut v = e.push.clone();
                        v.push(g);
                        rules.push((e.src.0 as usize, g, e.dst.0 as usize, v));
                    }
                }
            }
        }
        let mut changed = true;
        while changed {
            changed = false;
            for (p, g, q, v) in &rules {
                let mut at = BTreeSet::from([*q]);
                for s in v {
                    at = at
                        .iter()
                        .flat_map(|n| trans[*n].iter().filter(|(x, _)| x == s).map(|(_, m)| *m))
                        .collect();
                }
                for t in at {
                    changed |= trans[*p].insert((*g, t));
                }
            }
        }
        Some(Coreach { trans, sink })
    }

    pub fn contains(&self, c: &EpdaConfig) -> bool {
        let mut at = BTreeSet::from([c.state.0 as usize]);
        for s in c.stack.iter().rev() {
            at = at
                .iter()
                .flat_map(|n| self.trans[*n].iter().filter(|(x, _)| x == s).map(|(_, m)| *m))
                .collect();
        }
        at.contains(&self.sink)
    }
}

/// Looks for a derivation with two marking configurations and no generating
/// step between them.
pub fn double_marking_bounded<A: Ats>(ats: &A, depth: usize, b: Budget) -> Bounded<Derivation<A::Edge, A::Config>> {
    type Node<C> = (C, bool);
    type Parents<C, E> = HashMap<Node<C>, Option<(Node<C>, E)>>;
    let init = ats.forget_output(&ats.initial_config());
    let start: Node<A::Config> = (init.clone(), ats.is_marking(&init));
    let mut parent: Parents<A::Config, A::Edge> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut queue = VecDeque::from([(start, 0usize)]);
    let mut complete = true;
    let path = |parent: &Parents<A::Config, A::Edge>, mut n: Node<A::Config>| {
        let mut edges = Vec::new();
        while let Some(Some((p, e))) = parent.get(&n) {
            edges.push(e.clone());
            n = p.clone();
        }
        edges.reverse();
        edges
    };
    while let Some(((c, marked), d)) = queue.pop_front() {
        for (e, s) in ats.successors(&c) {
            let gen = ats.output_len(&s) > ats.output_len(&c);
            let s = ats.forget_output(&s);
            let m = ats.is_marking(&s);
            if !gen && m && marked {
                let mut edges = path(&parent, (c.clone(), marked));
                edges.push(e);
                return Bounded {
                    found: replay(ats, &edges),
                    complete,
                };
            }
            let node = (s, if gen { m } else { marked || m });
            if parent.contains_key(&node) {
                continue;
            }
            if d >= depth || parent.len() >= b.max_configs {
                complete = false;
                continue;
            }
            parent.insert(node.clone(), Some(((c.clone(), marked), e)));
            queue.push_back((node, d + 1));
        }
    }
    Bounded {
        found: None,
        complete,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Accessibility {
    pub unwitnessed_states: Vec<String>,
    pub unwitnessed_edges: Vec<usize>,
    pub complete: bool,
}

impl Accessibility {
    pub fn ok(&self) -> bool {
        self.unwitnessed_states.is_empty() && self.unwitnessed_edges.is_empty()
    }
}

/// States and edges of `a` not used by any explored initial derivation.
pub fn accessibility_bounded(a: &Epda, depth: usize, b: Budget) -> Accessibility {
    let sys = a.system();
    let ex = explore_with(&sys, budget(depth, b), Mode::Quotient, |_| true);
    let mut states = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for (i, c) in ex.configs.iter().enumerate() {
        states.insert(c.state);
        if ex.depths[i] < depth {
            for (e, _) in sys.successors(c) {
                edges.insert(e);
            }
        }
    }
    Accessibility {
        unwitnessed_states: (0..a.states.len() as u32)
            .filter(|s| !states.contains(&crate::epda::State(*s)))
            .map(|s| a.states[s as usize].clone())
            .collect(),
        unwitnessed_edges: (0..a.edges.len()).filter(|e| !edges.contains(e)).collect(),
        complete: ex.complete,
    }
}

/// `None` when the bounded languages agree, otherwise the first differing
/// word in length-lexicographic order.
pub fn languages_equal_upto(
    a: &dyn BoundedLanguage,
    b: &dyn BoundedLanguage,
    n: usize,
    marked: bool,
    budget: Budget,
) -> Result<Option<Word>> {
    let la = a.bounded_language(marked, n, budget);
    let lb = b.bounded_language(marked, n, budget);
    if !la.complete || !lb.complete {
        return Err(Error::Inconclusive(format!(
            "language enumeration up to length {} hit the budget",
            n
        )));
    }
    let mut diff: Vec<Word> = la.words.symmetric_difference(&lb.words).cloned().collect();
    diff.sort_by(length_lex);
    Ok(diff.into_iter().next())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Bounds {
    pub n: usize,
    pub depth: usize,
    pub horizon: usize,
    pub max_configs: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            n: 8,
            depth: 40,
            horizon: 40,
            max_configs: Budget::default().max_configs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckItem {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    /// Whether the underlying search exhausted its space.
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Report {
    pub bounds: Bounds,
    pub items: Vec<CheckItem>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.items.iter().all(|i| i.passed)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for i in &self.items {
            out.push_str(&format!(
                "{:<16} {}  {}\n",
                i.name,
                if i.passed { "ok" } else { "FAIL" },
                i.detail
            ));
        }
        out
    }
}

pub fn render_word(w: &Word) -> String {
    if w.is_empty() {
        "ε".into()
    } else {
        w.join(" ")
    }
}

/// Checks that `m2` solves the problem for `m`: equal marked languages,
/// accessibility, no deadlock, no lifelock and operational blockfreeness,
/// each within the given bounds.
pub fn verify_solution(m: &Epda, m2: &Epda, bounds: Bounds) -> Result<Report> {
    let b = Budget::new(10_000, bounds.max_configs);
    let mut items = Vec::new();

    let diff = languages_equal_upto(m, m2, bounds.n, true, b)?;
    items.push(CheckItem {
        name: "marked-language",
        passed: diff.is_none(),
        detail: match &diff {
            None => format!("equal up to length {}", bounds.n),
            Some(w) => format!("differ on {}", render_word(w)),
        },
        complete: true,
    });

    let acc = accessibility_bounded(m2, bounds.depth, b);
    items.push(CheckItem {
        name: "accessible",
        passed: acc.ok(),
        detail: if acc.ok() {
            format!("all states and edges used within depth {}", bounds.depth)
        } else {
            format!(
                "unwitnessed states {:?}, edges {:?}",
                acc.unwitnessed_states, acc.unwitnessed_edges
            )
        },
        complete: acc.complete,
    });

    let sys = m2.system();
    let dl = has_deadlock_bounded(&sys, bounds.depth, b);
    items.push(CheckItem {
        name: "deadlock-free",
        passed: dl.is_clean(),
        detail: match &dl.found {
            None => format!("none within depth {}", bounds.depth),
            Some(d) => format!("deadlock in {} after {} steps", m2.state_name(d.last().state), d.len()),
        },
        complete: dl.complete,
    });

    let ll = has_lifelock_bounded(&sys, bounds.depth, b);
    items.push(CheckItem {
        name: "lifelock-free",
        passed: ll.is_clean(),
        detail: match &ll.found {
            None => format!("none within depth {}", bounds.depth),
            Some(l) => format!(
                "{:?} lifelock from {} after {} steps",
                l.kind,
                m2.state_name(l.derivation.config(l.segment_start).unwrap().state),
                l.segment_start
            ),
        },
        complete: ll.complete,
    });

    let bf = blockfree_bounded(&sys, bounds.depth, bounds.horizon, b);
    // continuations longer than the horizon are decided by saturation
    let co = Coreach::new(m2);
    let (certified, open): (Vec<_>, Vec<_>) = bf
        .unknown
        .iter()
        .partition(|c| co.as_ref().is_some_and(|co| co.contains(c)));
    items.push(CheckItem {
        name: "blockfree",
        passed: open.is_empty(),
        detail: if open.is_empty() {
            format!(
                "{} configurations reach marking, {} within {} symbols, {} by saturation",
                bf.checked,
                bf.checked - certified.len(),
                bounds.horizon,
                certified.len()
            )
        } else {
            format!(
                "{} of {} configurations without marking continuation, first in {}",
                open.len(),
                bf.checked,
                m2.state_name(open[0].state)
            )
        },
        complete: bf.complete,
    });

    Ok(Report { bounds, items })
}
