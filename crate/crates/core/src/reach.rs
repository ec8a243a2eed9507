//! Stack-prefix overapproximation of reachable configurations and
//! accessibility enforcement.
//!
//! [`k_prefix_overapprox`] computes, for every pair of states, a set of words
//! of length at most `k` that contains the `k`-prefix of every stack with which
//! the second state is reachable. A stored word of length exactly `k` may be a
//! truncated stack; popping past its end continues with every completion over
//! the stack alphabet.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::cfg::{self, StepThreeMode};
use crate::epda::{self, Epda, Origin, Provenance, StackSym, State};
use crate::error::{Error, Result};

pub type StackWord = Vec<StackSym>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReachApprox {
    pub k: usize,
    pub initial: State,
    /// `R(p, p)`; equal to the union of column `p`.
    diag: BTreeMap<State, BTreeSet<StackWord>>,
    /// Words written for `R(p, p')` by a single edge.
    direct: BTreeMap<State, BTreeMap<State, BTreeSet<StackWord>>>,
}

impl ReachApprox {
    /// `R(p)(p')`.
    pub fn get(&self, p: State, p2: State) -> BTreeSet<StackWord> {
        let mut out = BTreeSet::new();
        if p == self.initial && p2 == self.initial {
            out.insert(kprefix(&[epda::BOTTOM], self.k));
        }
        for from in self.reach_from(p) {
            if let Some(ws) = self.direct.get(&from).and_then(|m| m.get(&p2)) {
                out.extend(ws.iter().cloned());
            }
        }
        out
    }

    /// `R(q0)(p)`.
    pub fn from_initial(&self, p: State) -> BTreeSet<StackWord> {
        self.diag.get(&p).cloned().unwrap_or_default()
    }

    /// States `p` with a nonempty `R(q0)(p)`.
    pub fn reachable_states(&self) -> BTreeSet<State> {
        self.diag
            .iter()
            .filter(|(_, ws)| !ws.is_empty())
            .map(|(p, _)| *p)
            .collect()
    }

    /// `p` together with every state linked from it by a chain of nonempty
    /// entries.
    fn reach_from(&self, p: State) -> BTreeSet<State> {
        let mut seen = BTreeSet::from([p]);
        let mut queue = VecDeque::from([p]);
        while let Some(x) = queue.pop_front() {
            if let Some(m) = self.direct.get(&x) {
                for (y, ws) in m {
                    if !ws.is_empty() && seen.insert(*y) {
                        queue.push_back(*y);
                    }
                }
            }
        }
        seen
    }

    /// Some stored word for `p` admits an edge popping `pop`.
    pub fn admits(&self, p: State, pop: &[StackSym]) -> bool {
        self.diag
            .get(&p)
            .is_some_and(|ws| ws.iter().any(|w| compatible(w, pop, self.k)))
    }

    pub fn render(&self, a: &Epda) -> String {
        let mut out = String::new();
        for (p, ws) in &self.diag {
            let words: Vec<String> = ws.iter().map(|w| render_word(a, w)).collect();
            out.push_str(&format!("{}: {{{}}}\n", a.state_name(*p), words.join(", ")));
        }
        out
    }
}

pub fn render_word(a: &Epda, w: &[StackSym]) -> String {
    if w.is_empty() {
        "ε".to_string()
    } else {
        w.iter().map(|g| a.stack_name(*g)).collect::<Vec<_>>().join("·")
    }
}

pub fn kprefix(w: &[StackSym], k: usize) -> StackWord {
    w[..w.len().min(k)].to_vec()
}

/// Could a stack whose stored prefix is `w` start with `pop`?
pub fn compatible(w: &[StackSym], pop: &[StackSym], k: usize) -> bool {
    let n = w.len().min(pop.len());
    w[..n] == pop[..n] && (w.len() >= pop.len() || w.len() == k)
}

/// Successor words of `w` under an edge popping `g` and pushing `push`.
fn successors(w: &[StackSym], g: StackSym, push: &[StackSym], k: usize, gamma: usize) -> Vec<StackWord> {
    let truncated = w.len() == k;
    let rest: &[StackSym] = match w.first() {
        Some(h) if *h == g => &w[1..],
        Some(_) => return vec![],
        None if truncated => &[],
        None => return vec![],
    };
    let mut base = push.to_vec();
    base.extend_from_slice(rest);
    if !truncated || base.len() >= k {
        return vec![kprefix(&base, k)];
    }
    let mut out = Vec::new();
    if w.last() == Some(&epda::BOTTOM) {
        out.push(base.clone());
    }
    let missing = k - base.len();
    let mut frontier = vec![base];
    for depth in 1..=missing {
        let mut next = Vec::new();
        for b in &frontier {
            for s in 0..gamma as u32 {
                let mut b2 = b.clone();
                b2.push(StackSym(s));
                if depth == missing || StackSym(s) == epda::BOTTOM {
                    out.push(b2);
                } else {
                    next.push(b2);
                }
            }
        }
        frontier = next;
    }
    out
}

/// The least solution of the three closure rules (initial configuration,
/// closure under steps, transitivity). Requires a 1-popping automaton.
pub fn k_prefix_overapprox(a: &Epda, k: usize) -> Result<ReachApprox> {
    if a.edges.iter().any(|e| e.pop.len() != 1) {
        return Err(Error::Subclass("overapproximation requires a 1-popping automaton".into()));
    }
    let mut by_src: BTreeMap<State, Vec<usize>> = BTreeMap::new();
    for (i, e) in a.edges.iter().enumerate() {
        by_src.entry(e.src).or_default().push(i);
    }
    let mut r = ReachApprox {
        k,
        initial: a.initial,
        diag: BTreeMap::new(),
        direct: BTreeMap::new(),
    };
    let start = kprefix(&[epda::BOTTOM], k);
    r.diag.entry(a.initial).or_default().insert(start.clone());
    let mut queue = VecDeque::from([(a.initial, start)]);
    while let Some((p, w)) = queue.pop_front() {
        for &i in by_src.get(&p).map(Vec::as_slice).unwrap_or(&[]) {
            let e = &a.edges[i];
            for w2 in successors(&w, e.pop[0], &e.push, k, a.stack.len()) {
                r.direct
                    .entry(p)
                    .or_default()
                    .entry(e.dst)
                    .or_default()
                    .insert(w2.clone());
                if r.diag.entry(e.dst).or_default().insert(w2.clone()) {
                    queue.push_back((e.dst, w2));
                }
            }
        }
    }
    Ok(r)
}

/// `R(q0)(p)` for every approximately reachable `p`.
pub fn k_prefix_overapprox_from_initial(a: &Epda, k: usize) -> BTreeMap<State, BTreeSet<StackWord>> {
    match k_prefix_overapprox(a, k) {
        Ok(r) => r.diag,
        Err(_) => BTreeMap::new(),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PruneReport {
    pub removed_states: Vec<String>,
    pub removed_edges: Vec<usize>,
    /// For every kept edge, its index in the input.
    pub kept: Provenance,
}

/// Removes states and edges that the `k`-overapproximation proves
/// unreachable.
pub fn prune_obvious(a: &Epda, k: usize) -> Result<(Epda, PruneReport)> {
    let r = k_prefix_overapprox(a, k)?;
    let live = r.reachable_states();
    let keep: BTreeSet<usize> = a
        .edges
        .iter()
        .enumerate()
        .filter(|(_, e)| live.contains(&e.src) && r.admits(e.src, &e.pop))
        .map(|(i, _)| i)
        .collect();
    let out = a.restrict(&keep);
    let removed_states = a
        .states
        .iter()
        .filter(|s| out.state(s).is_none())
        .cloned()
        .collect();
    let removed_edges = (0..a.edges.len()).filter(|i| !keep.contains(i)).collect();
    let kept = Provenance {
        origins: keep.iter().map(|&i| Origin::Edge(i)).collect(),
    };
    Ok((
        out,
        PruneReport {
            removed_states,
            removed_edges,
            kept,
        },
    ))
}

/// Keeps exactly the edges of `a` that occur in some marking derivation, by
/// running the grammar construction and tracing the surviving productions
/// back to edges.
pub fn enforce_accessibility(a: &Epda) -> Result<Epda> {
    let keep = accessible_edges(a)?;
    Ok(a.restrict(&keep))
}

pub fn accessible_edges(a: &Epda) -> Result<BTreeSet<usize>> {
    let (m1, p1) = epda::to_sdpda(a)?;
    let (m2, p2) = epda::remove_double_marking(&m1)?;
    let (g, p3) = cfg::sdpda_to_cfg_with(&m2, StepThreeMode::Productive)?;
    let (_, kept) = cfg::trim(&g)?;
    let chain = p3.then(&p2).then(&p1);
    Ok(kept
        .iter()
        .filter_map(|&i| chain.origin_edge(i))
        .collect())
}
