//! Extended pushdown automata.
//!
//! An [`Epda`] generates output symbols on its edges. Edges pop and push whole
//! stack words; words are written top-first. The stack symbol with id 0 is the
//! end-of-stack marker and may never be removed.

mod marking;
mod popping;
mod simple;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::ats::{Ats, Sym};
use crate::error::{Error, Result};
use crate::reach;

pub use marking::remove_double_marking;
pub use popping::edpda_to_dpda;
pub use simple::to_sdpda;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct State(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StackSym(pub u32);

/// The end-of-stack marker.
pub const BOTTOM: StackSym = StackSym(0);
pub const BOTTOM_NAME: &str = "$bot";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: State,
    pub label: Option<Sym>,
    /// Popped word, top first.
    pub pop: Vec<StackSym>,
    /// Pushed word, top first.
    pub push: Vec<StackSym>,
    pub dst: State,
}

impl Edge {
    pub fn new(src: State, label: Option<Sym>, pop: Vec<StackSym>, push: Vec<StackSym>, dst: State) -> Self {
        Edge {
            src,
            label,
            pop,
            push,
            dst,
        }
    }

    /// `(p, a, γ, γ, q)`
    pub fn is_generating(&self) -> bool {
        self.label.is_some() && self.pop.len() == 1 && self.pop == self.push
    }

    /// `(p, ε, γ, ε, q)`
    pub fn is_pop(&self) -> bool {
        self.label.is_none() && self.pop.len() == 1 && self.push.is_empty()
    }

    /// `(p, ε, γ, γ'γ, q)`
    pub fn is_push(&self) -> bool {
        self.label.is_none()
            && self.pop.len() == 1
            && self.push.len() == 2
            && self.push[1] == self.pop[0]
    }

    pub fn is_simple(&self) -> bool {
        self.is_generating() || self.is_pop() || self.is_push()
    }
}

/// Origin of a constructed edge or production.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Origin {
    /// Built for this edge of the input automaton.
    Edge(usize),
    /// The start production of a triple grammar.
    Start,
    /// A marking production `L(p,γ) -> ε`.
    Marking,
}

/// Maps every constructed object (by index) to its origin.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Provenance {
    pub origins: Vec<Origin>,
}

impl Provenance {
    pub fn origin(&self, i: usize) -> Option<Origin> {
        self.origins.get(i).copied()
    }

    pub fn origin_edge(&self, i: usize) -> Option<usize> {
        match self.origins.get(i) {
            Some(Origin::Edge(e)) => Some(*e),
            _ => None,
        }
    }

    /// Composes `self: C -> B` after `inner: B -> A`, yielding `C -> A`.
    pub fn then(&self, inner: &Provenance) -> Provenance {
        Provenance {
            origins: self
                .origins
                .iter()
                .map(|o| match o {
                    Origin::Edge(e) => inner.origins[*e],
                    other => *other,
                })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Epda {
    pub states: Vec<String>,
    pub outputs: Vec<String>,
    /// Index 0 is the end-of-stack marker.
    pub stack: Vec<String>,
    pub edges: Vec<Edge>,
    pub initial: State,
    pub marking: BTreeSet<State>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct EpdaConfig {
    pub state: State,
    pub history: Vec<Sym>,
    /// Stack contents with the top at the **end** of the vector.
    pub stack: Vec<StackSym>,
}

impl EpdaConfig {
    /// The stack as a top-first word.
    pub fn stack_word(&self) -> Vec<StackSym> {
        self.stack.iter().rev().copied().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub edge: Option<usize>,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.edge {
            Some(e) => write!(f, "edge {}: {}", e, self.message),
            None => f.write_str(&self.message),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubclassReport {
    pub one_popping: bool,
    pub epsilon_free: bool,
    pub stack_free: bool,
    /// Pairs of edges that may be enabled together, after discarding pairs
    /// that the 1-prefix stack overapproximation rules out.
    pub conflicts: Vec<(usize, usize)>,
}

impl SubclassReport {
    pub fn deterministic(&self) -> bool {
        self.conflicts.is_empty()
    }

    pub fn is_dpda(&self) -> bool {
        self.deterministic() && self.one_popping
    }

    pub fn is_dfa(&self) -> bool {
        self.deterministic() && self.stack_free && self.epsilon_free
    }
}

impl Epda {
    /// An automaton with a single state, no edges and only the end-of-stack
    /// marker on the stack alphabet.
    pub fn new(initial: &str) -> Self {
        Epda {
            states: vec![initial.to_string()],
            outputs: Vec::new(),
            stack: vec![BOTTOM_NAME.to_string()],
            edges: Vec::new(),
            initial: State(0),
            marking: BTreeSet::new(),
        }
    }

    pub fn state(&self, name: &str) -> Option<State> {
        self.states.iter().position(|s| s == name).map(|i| State(i as u32))
    }

    pub fn stack_sym(&self, name: &str) -> Option<StackSym> {
        self.stack.iter().position(|s| s == name).map(|i| StackSym(i as u32))
    }

    pub fn output(&self, name: &str) -> Option<Sym> {
        self.outputs.iter().position(|s| s == name).map(|i| Sym(i as u32))
    }

    pub fn state_name(&self, s: State) -> &str {
        &self.states[s.0 as usize]
    }

    pub fn stack_name(&self, s: StackSym) -> &str {
        &self.stack[s.0 as usize]
    }

    pub fn output_name(&self, s: Sym) -> &str {
        &self.outputs[s.0 as usize]
    }

    pub fn add_state(&mut self, name: &str) -> State {
        self.state(name).unwrap_or_else(|| {
            self.states.push(name.to_string());
            State(self.states.len() as u32 - 1)
        })
    }

    pub fn add_stack_sym(&mut self, name: &str) -> StackSym {
        self.stack_sym(name).unwrap_or_else(|| {
            self.stack.push(name.to_string());
            StackSym(self.stack.len() as u32 - 1)
        })
    }

    pub fn add_output(&mut self, name: &str) -> Sym {
        self.output(name).unwrap_or_else(|| {
            self.outputs.push(name.to_string());
            Sym(self.outputs.len() as u32 - 1)
        })
    }

    /// Adds an edge by names, declaring unknown names on the fly. `label`
    /// `None` is ε; words are top-first.
    pub fn add_edge(&mut self, src: &str, label: Option<&str>, pop: &[&str], push: &[&str], dst: &str) -> usize {
        let src = self.add_state(src);
        let dst = self.add_state(dst);
        let label = label.map(|l| self.add_output(l));
        let pop = pop.iter().map(|s| self.add_stack_sym(s)).collect();
        let push = push.iter().map(|s| self.add_stack_sym(s)).collect();
        self.edges.push(Edge::new(src, label, pop, push, dst));
        self.edges.len() - 1
    }

    pub fn set_marking(&mut self, names: &[&str]) {
        self.marking = names.iter().map(|n| self.add_state(n)).collect();
    }

    pub fn initial_config(&self) -> EpdaConfig {
        EpdaConfig {
            state: self.initial,
            history: Vec::new(),
            stack: vec![BOTTOM],
        }
    }

    /// Alphabet, marker and end-of-stack preservation checks.
    pub fn validate(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let v = |edge, message: String| Violation { edge, message };
        if self.stack.first().map(String::as_str) != Some(BOTTOM_NAME) {
            out.push(v(None, format!("stack alphabet must start with {}", BOTTOM_NAME)));
        }
        let nq = self.states.len() as u32;
        if self.initial.0 >= nq {
            out.push(v(None, "initial state is not a state".into()));
        }
        for m in &self.marking {
            if m.0 >= nq {
                out.push(v(None, format!("marking state {} is not a state", m.0)));
            }
        }
        for names in [&self.states, &self.outputs, &self.stack] {
            let distinct: BTreeSet<_> = names.iter().collect();
            if distinct.len() != names.len() {
                out.push(v(None, "duplicate name in an alphabet".into()));
            }
        }
        let ng = self.stack.len() as u32;
        let ns = self.outputs.len() as u32;
        for (i, e) in self.edges.iter().enumerate() {
            if e.src.0 >= nq || e.dst.0 >= nq {
                out.push(v(Some(i), "unknown state".into()));
            }
            if e.label.is_some_and(|l| l.0 >= ns) {
                out.push(v(Some(i), "unknown output symbol".into()));
            }
            if e.pop.iter().chain(&e.push).any(|g| g.0 >= ng) {
                out.push(v(Some(i), "unknown stack symbol".into()));
            }
            if e.pop.last() == Some(&BOTTOM) && e.push.last() != Some(&BOTTOM) {
                out.push(v(Some(i), "the end-of-stack marker is removed".into()));
            }
        }
        out
    }

    pub fn check_valid(&self) -> Result<()> {
        match self.validate().first() {
            None => Ok(()),
            Some(v) => Err(Error::Precondition(v.to_string())),
        }
    }

    pub fn classify(&self) -> SubclassReport {
        let one_popping = self.edges.iter().all(|e| e.pop.len() == 1);
        let epsilon_free = self.edges.iter().all(|e| e.label.is_some());
        let stack_free = self
            .edges
            .iter()
            .all(|e| e.label.is_some() && e.pop == [BOTTOM] && e.push == [BOTTOM]);
        let mut conflicts = self.syntactic_conflicts();
        if one_popping && !conflicts.is_empty() {
            let approx = reach::k_prefix_overapprox_from_initial(self, 1);
            conflicts.retain(|&(a, b)| {
                let (ea, eb) = (&self.edges[a], &self.edges[b]);
                approx
                    .get(&ea.src)
                    .is_some_and(|ws| ws.iter().any(|w| reach::compatible(w, &ea.pop, 1) && reach::compatible(w, &eb.pop, 1)))
            });
        }
        SubclassReport {
            one_popping,
            epsilon_free,
            stack_free,
            conflicts,
        }
    }

    /// Edge pairs from one state with prefix-comparable pop words whose
    /// labels are equal or include ε.
    pub fn syntactic_conflicts(&self) -> Vec<(usize, usize)> {
        let mut by_src: HashMap<State, Vec<usize>> = HashMap::new();
        for (i, e) in self.edges.iter().enumerate() {
            by_src.entry(e.src).or_default().push(i);
        }
        let mut out = Vec::new();
        for ids in by_src.values() {
            for (x, &a) in ids.iter().enumerate() {
                for &b in &ids[x + 1..] {
                    let (ea, eb) = (&self.edges[a], &self.edges[b]);
                    let labels_clash = ea.label.is_none() || eb.label.is_none() || ea.label == eb.label;
                    if labels_clash && crate::util::prefix_comparable(&ea.pop, &eb.pop) {
                        out.push((a, b));
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Requires a valid, 1-popping, syntactically deterministic automaton.
    pub fn require_dpda(&self) -> Result<()> {
        self.check_valid()?;
        let r = self.classify();
        if !r.one_popping {
            return Err(Error::Subclass("automaton is not 1-popping".into()));
        }
        if let Some((a, b)) = r.conflicts.first() {
            return Err(Error::Subclass(format!("edges {} and {} may be enabled together", a, b)));
        }
        Ok(())
    }

    pub fn require_sdpda(&self) -> Result<()> {
        self.require_dpda()?;
        if let Some(i) = self.edges.iter().position(|e| !e.is_simple()) {
            return Err(Error::Subclass(format!("edge {} is not generating, pop or push", i)));
        }
        Ok(())
    }

    /// Keeps exactly the edges in `keep`; states become the edge endpoints
    /// plus the initial state.
    pub fn restrict(&self, keep: &BTreeSet<usize>) -> Epda {
        let mut used: BTreeSet<State> = BTreeSet::from([self.initial]);
        for &i in keep {
            used.insert(self.edges[i].src);
            used.insert(self.edges[i].dst);
        }
        let renum: HashMap<State, State> = used
            .iter()
            .enumerate()
            .map(|(i, s)| (*s, State(i as u32)))
            .collect();
        Epda {
            states: used.iter().map(|s| self.states[s.0 as usize].clone()).collect(),
            outputs: self.outputs.clone(),
            stack: self.stack.clone(),
            edges: keep
                .iter()
                .map(|&i| {
                    let e = &self.edges[i];
                    Edge {
                        src: renum[&e.src],
                        dst: renum[&e.dst],
                        ..e.clone()
                    }
                })
                .collect(),
            initial: renum[&self.initial],
            marking: self.marking.iter().filter_map(|m| renum.get(m).copied()).collect(),
        }
    }

    pub fn system(&self) -> EpdaSystem<'_> {
        EpdaSystem::new(self)
    }

    pub fn render_edge(&self, e: &Edge) -> String {
        let word = |w: &[StackSym]| {
            if w.is_empty() {
                "ε".to_string()
            } else {
                w.iter().map(|g| self.stack_name(*g)).collect::<Vec<_>>().join("·")
            }
        };
        format!(
            "({}, {}, {}, {}, {})",
            self.state_name(e.src),
            e.label.map_or("ε", |l| self.output_name(l)),
            word(&e.pop),
            word(&e.push),
            self.state_name(e.dst)
        )
    }
}

/// An [`Epda`] prepared for stepping: edges indexed by source and stack top.
#[derive(Debug, Clone)]
pub struct EpdaSystem<'a> {
    pub epda: &'a Epda,
    by_top: HashMap<(State, StackSym), Vec<usize>>,
    zero_pop: HashMap<State, Vec<usize>>,
}

impl<'a> EpdaSystem<'a> {
    pub fn new(epda: &'a Epda) -> Self {
        let mut by_top: HashMap<(State, StackSym), Vec<usize>> = HashMap::new();
        let mut zero_pop: HashMap<State, Vec<usize>> = HashMap::new();
        for (i, e) in epda.edges.iter().enumerate() {
            match e.pop.first() {
                Some(top) => by_top.entry((e.src, *top)).or_default().push(i),
                None => zero_pop.entry(e.src).or_default().push(i),
            }
        }
        EpdaSystem {
            epda,
            by_top,
            zero_pop,
        }
    }

    fn apply(&self, c: &EpdaConfig, i: usize) -> Option<EpdaConfig> {
        let e = &self.epda.edges[i];
        let n = c.stack.len();
        if e.pop.len() > n || !e.pop.iter().zip(c.stack.iter().rev()).all(|(a, b)| a == b) {
            return None;
        }
        let mut stack = c.stack[..n - e.pop.len()].to_vec();
        stack.extend(e.push.iter().rev());
        let mut history = c.history.clone();
        history.extend(e.label);
        Some(EpdaConfig {
            state: e.dst,
            history,
            stack,
        })
    }
}

impl Ats for EpdaSystem<'_> {
    type Edge = usize;
    type Config = EpdaConfig;

    fn initial_config(&self) -> EpdaConfig {
        self.epda.initial_config()
    }

    fn check_config(&self, c: &EpdaConfig) -> Result<()> {
        if c.state.0 as usize >= self.epda.states.len() {
            return Err(Error::InvalidConfig(format!("unknown state {}", c.state.0)));
        }
        if c.stack.is_empty() {
            return Err(Error::InvalidConfig("empty stack".into()));
        }
        if c.stack.iter().any(|g| g.0 as usize >= self.epda.stack.len()) {
            return Err(Error::InvalidConfig("unknown stack symbol".into()));
        }
        if c.history.iter().any(|s| s.0 as usize >= self.epda.outputs.len()) {
            return Err(Error::InvalidConfig("unknown output symbol".into()));
        }
        Ok(())
    }

    fn successors(&self, c: &EpdaConfig) -> Vec<(usize, EpdaConfig)> {
        let mut ids: Vec<usize> = Vec::new();
        if let Some(top) = c.stack.last() {
            if let Some(v) = self.by_top.get(&(c.state, *top)) {
                ids.extend(v);
            }
        }
        if let Some(v) = self.zero_pop.get(&c.state) {
            ids.extend(v);
        }
        ids.sort_unstable();
        ids.into_iter()
            .filter_map(|i| self.apply(c, i).map(|n| (i, n)))
            .collect()
    }

    fn is_marking(&self, c: &EpdaConfig) -> bool {
        self.epda.marking.contains(&c.state)
    }

    fn state_name(&self, c: &EpdaConfig) -> Option<String> {
        Some(self.epda.state_name(c.state).to_string())
    }

    fn output(&self, c: &EpdaConfig) -> Vec<Sym> {
        c.history.clone()
    }

    fn output_len(&self, c: &EpdaConfig) -> usize {
        c.history.len()
    }

    fn forget_output(&self, c: &EpdaConfig) -> EpdaConfig {
        EpdaConfig {
            history: Vec::new(),
            ..c.clone()
        }
    }

    fn symbol_name(&self, s: Sym) -> String {
        self.epda.output_name(s).to_string()
    }

    fn distinguishable(&self, _from: &EpdaConfig, a: &(usize, EpdaConfig), b: &(usize, EpdaConfig)) -> bool {
        match (self.epda.edges[a.0].label, self.epda.edges[b.0].label) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        }
    }
}

impl crate::ats::BoundedLanguage for Epda {
    fn bounded_language(&self, marked: bool, max_len: usize, budget: crate::ats::Budget) -> crate::ats::Language {
        crate::ats::language(&self.system(), marked, max_len, budget)
    }
}
