//! Abstract transition systems.
//!
//! Pushdown automata, grammars and parsers are all driven through the [`Ats`]
//! trait: a configuration type, a finite step enumeration, a marking predicate
//! and an output (history) projection. Everything in [`crate::oracle`] and the
//! bounded language enumeration below is written once against this trait.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt::Debug;
use std::hash::Hash;

use crate::error::{Error, Result};

/// Identifier of an output symbol inside the output alphabet of one artifact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sym(pub u32);

/// A word over output symbols, rendered by name so that languages of
/// different artifacts can be compared directly.
pub type Word = Vec<String>;

pub trait Ats {
    type Edge: Clone + Eq + Hash + Debug;
    type Config: Clone + Eq + Hash + Debug;

    fn initial_config(&self) -> Self::Config;

    /// Well-formedness of a configuration with respect to this system.
    fn check_config(&self, c: &Self::Config) -> Result<()>;

    /// All successors of `c`, in a fixed order.
    fn successors(&self, c: &Self::Config) -> Vec<(Self::Edge, Self::Config)>;

    fn is_marking(&self, c: &Self::Config) -> bool;

    /// State projection; `None` when the configuration carries no state.
    fn state_name(&self, c: &Self::Config) -> Option<String>;

    /// The generated output of `c`. Never shrinks along a step.
    fn output(&self, c: &Self::Config) -> Vec<Sym>;

    fn output_len(&self, c: &Self::Config) -> usize {
        self.output(c).len()
    }

    fn unmarked_outputs(&self, c: &Self::Config) -> Vec<Vec<Sym>> {
        vec![self.output(c)]
    }

    fn marked_outputs(&self, c: &Self::Config) -> Vec<Vec<Sym>> {
        vec![self.output(c)]
    }

    /// The same configuration with its history erased. Steps never inspect
    /// the history, so exploring quotiented configurations is exact for
    /// everything but the languages.
    fn forget_output(&self, c: &Self::Config) -> Self::Config;

    fn symbol_name(&self, s: Sym) -> String;

    /// Whether two distinct steps out of `from` are allowed to coexist in a
    /// deterministic system.
    fn distinguishable(
        &self,
        from: &Self::Config,
        a: &(Self::Edge, Self::Config),
        b: &(Self::Edge, Self::Config),
    ) -> bool {
        match (appended(self, from, &a.1), appended(self, from, &b.1)) {
            (Some(x), Some(y)) => x != y,
            _ => false,
        }
    }
}

/// The symbol appended to the output by the step `from -> to`, if any.
pub fn appended<A: Ats + ?Sized>(ats: &A, from: &A::Config, to: &A::Config) -> Option<Sym> {
    let before = ats.output_len(from);
    let out = ats.output(to);
    if out.len() > before {
        out.last().copied()
    } else {
        None
    }
}

/// Validated step enumeration.
pub fn steps<A: Ats>(ats: &A, c: &A::Config) -> Result<Vec<(A::Edge, A::Config)>> {
    ats.check_config(c)?;
    Ok(ats.successors(c))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    pub max_steps: usize,
    pub max_configs: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_steps: 10_000,
            max_configs: 100_000,
        }
    }
}

impl Budget {
    pub fn new(max_steps: usize, max_configs: usize) -> Self {
        Budget {
            max_steps,
            max_configs,
        }
    }
}

/// A finite derivation: element 0 carries no edge, every later element
/// carries the edge of the step that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Derivation<E, C> {
    items: Vec<(Option<E>, C)>,
}

impl<E: Clone + PartialEq, C: Clone + PartialEq> Derivation<E, C> {
    pub fn start(c: C) -> Self {
        Derivation {
            items: vec![(None, c)],
        }
    }

    pub fn push(&mut self, e: E, c: C) {
        self.items.push((Some(e), c));
    }

    pub fn items(&self) -> &[(Option<E>, C)] {
        &self.items
    }

    /// Number of steps (elements minus one).
    pub fn len(&self) -> usize {
        self.items.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn first(&self) -> &C {
        &self.items[0].1
    }

    pub fn last(&self) -> &C {
        &self.items[self.items.len() - 1].1
    }

    pub fn config(&self, i: usize) -> Option<&C> {
        self.items.get(i).map(|(_, c)| c)
    }

    pub fn edges(&self) -> impl Iterator<Item = &E> {
        self.items.iter().filter_map(|(e, _)| e.as_ref())
    }

    /// `(d1 ·n d2)(i) = d1(i)` for `i <= n`, `d2(i - n)` otherwise.
    pub fn concat(&self, n: usize, other: &Derivation<E, C>) -> Result<Derivation<E, C>> {
        let Some((_, glue)) = self.items.get(n) else {
            return Err(Error::GlueMismatch(n));
        };
        let (first_edge, first_cfg) = &other.items[0];
        if first_edge.is_some() || first_cfg != glue {
            return Err(Error::GlueMismatch(n));
        }
        let mut items = self.items[..=n].to_vec();
        items.extend(other.items[1..].iter().cloned());
        Ok(Derivation { items })
    }
}

impl<E, C> Derivation<E, C>
where
    E: Clone + Eq + Hash + Debug,
    C: Clone + Eq + Hash + Debug,
{
    /// Every adjacent pair is a step of `ats`.
    pub fn is_valid<A: Ats<Edge = E, Config = C>>(&self, ats: &A) -> bool {
        if self.items[0].0.is_some() {
            return false;
        }
        self.items.windows(2).all(|w| {
            let (_, from) = &w[0];
            let (Some(e), to) = &w[1] else {
                return false;
            };
            ats.successors(from)
                .iter()
                .any(|(e2, c2)| e2 == e && c2 == to)
        })
    }

    pub fn is_initial<A: Ats<Edge = E, Config = C>>(&self, ats: &A) -> bool {
        *self.first() == ats.initial_config()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// Configurations keep their history.
    WithOutput,
    /// Histories are erased before deduplication.
    Quotient,
}

/// Breadth-first closure of the reachable configurations.
#[derive(Debug, Clone)]
pub struct Exploration<E, C> {
    pub configs: Vec<C>,
    pub parents: Vec<Option<(usize, E)>>,
    pub depths: Vec<usize>,
    pub index: HashMap<C, usize>,
    /// True iff the frontier was exhausted within the budget.
    pub complete: bool,
}

impl<E: Clone + PartialEq, C: Clone + Eq + Hash> Exploration<E, C> {
    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn contains(&self, c: &C) -> bool {
        self.index.contains_key(c)
    }

    /// The initial derivation ending in configuration `i`, following parent
    /// links.
    pub fn derivation_to(&self, i: usize) -> Derivation<E, C> {
        let mut chain = Vec::new();
        let mut cur = i;
        while let Some((p, e)) = &self.parents[cur] {
            chain.push((e.clone(), self.configs[cur].clone()));
            cur = *p;
        }
        let mut d = Derivation::start(self.configs[cur].clone());
        for (e, c) in chain.into_iter().rev() {
            d.push(e, c);
        }
        d
    }
}

pub fn explore<A: Ats>(ats: &A, budget: Budget) -> Exploration<A::Edge, A::Config> {
    explore_with(ats, budget, Mode::WithOutput, |_| true)
}

/// Explores configurations satisfying `keep`; configurations failing it are
/// neither recorded nor expanded and do not count as truncation.
pub fn explore_with<A: Ats>(
    ats: &A,
    budget: Budget,
    mode: Mode,
    keep: impl Fn(&A::Config) -> bool,
) -> Exploration<A::Edge, A::Config> {
    let norm = |c: A::Config| match mode {
        Mode::WithOutput => c,
        Mode::Quotient => ats.forget_output(&c),
    };
    let init = norm(ats.initial_config());
    let mut ex = Exploration {
        configs: vec![init.clone()],
        parents: vec![None],
        depths: vec![0],
        index: HashMap::from([(init, 0)]),
        complete: true,
    };
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let depth = ex.depths[i];
        for (e, next) in ats.successors(&ex.configs[i]) {
            let next = norm(next);
            if !keep(&next) || ex.index.contains_key(&next) {
                continue;
            }
            if depth >= budget.max_steps || ex.configs.len() >= budget.max_configs {
                ex.complete = false;
                continue;
            }
            let j = ex.configs.len();
            ex.index.insert(next.clone(), j);
            ex.configs.push(next);
            ex.parents.push(Some((i, e)));
            ex.depths.push(depth + 1);
            queue.push_back(j);
        }
    }
    ex
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Language {
    pub words: BTreeSet<Word>,
    /// True iff every word of the true language up to the bound was found.
    pub complete: bool,
}

pub fn render<A: Ats + ?Sized>(ats: &A, w: &[Sym]) -> Word {
    w.iter().map(|s| ats.symbol_name(*s)).collect()
}

/// Marked (or unmarked) words of length at most `max_len`.
pub fn language<A: Ats>(ats: &A, marked: bool, max_len: usize, budget: Budget) -> Language {
    let ex = explore_with(ats, budget, Mode::WithOutput, |c| {
        ats.output_len(c) <= max_len
    });
    let mut words = BTreeSet::new();
    for c in &ex.configs {
        let outs = if marked {
            if !ats.is_marking(c) {
                continue;
            }
            ats.marked_outputs(c)
        } else {
            ats.unmarked_outputs(c)
        };
        for w in outs {
            if w.len() <= max_len {
                words.insert(render(ats, &w));
            }
        }
        if !marked {
            // a step may append several symbols at once; the prefixes of an
            // overlong successor still count
            for (_, s) in ats.successors(c) {
                if ats.output_len(&s) > max_len {
                    for w in ats.unmarked_outputs(&s) {
                        if w.len() <= max_len {
                            words.insert(render(ats, &w));
                        }
                    }
                }
            }
        }
    }
    Language {
        words,
        complete: ex.complete,
    }
}

/// Sources of bounded languages; implemented by every formalism, with
/// grammars using an exact fixpoint instead of exploration.
pub trait BoundedLanguage {
    fn bounded_language(&self, marked: bool, max_len: usize, budget: Budget) -> Language;
}

/// Sorts words by length first, then lexicographically by symbol names.
pub fn length_lex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// The prefix closure of a set of words.
pub fn prefix_closure(words: &BTreeSet<Word>) -> BTreeSet<Word> {
    let mut out = BTreeSet::new();
    for w in words {
        for i in 0..=w.len() {
            out.insert(w[..i].to_vec());
        }
    }
    out
}
