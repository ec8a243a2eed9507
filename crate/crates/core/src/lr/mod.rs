//! Canonical LR(1) machines and the parsers built from them.

mod build;

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use crate::cfg::{first_of, Cfg, First, Symbol, EOF_NAME};
use crate::error::{Error, Result};

pub use build::{build_parser, detect_conflicts, parser_conflicts};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub prod: usize,
    pub dot: usize,
    pub look: First,
}

pub type ItemSet = BTreeSet<Item>;

/// Grammar data shared by closure computations.
pub struct LrContext<'a> {
    pub g: &'a Cfg,
    first: Vec<BTreeSet<u32>>,
    null: Vec<bool>,
    by_lhs: Vec<Vec<usize>>,
}

impl<'a> LrContext<'a> {
    pub fn new(g: &'a Cfg) -> Self {
        LrContext {
            g,
            first: g.first_sets(),
            null: g.nullable(),
            by_lhs: g.by_lhs(),
        }
    }

    /// The symbol after the dot, if any.
    pub fn next(&self, it: &Item) -> Option<Symbol> {
        self.g.productions[it.prod].rhs.get(it.dot).copied()
    }

    pub fn closure(&self, items: &ItemSet) -> ItemSet {
        let mut out = items.clone();
        let mut queue: VecDeque<Item> = items.iter().copied().collect();
        while let Some(it) = queue.pop_front() {
            let rhs = &self.g.productions[it.prod].rhs;
            let Some(Symbol::N(b)) = rhs.get(it.dot) else {
                continue;
            };
            let mut rest = rhs[it.dot + 1..].to_vec();
            if let Some(t) = it.look {
                rest.push(Symbol::T(t));
            }
            let looks = first_of(&rest, &self.first, &self.null);
            for &p in &self.by_lhs[*b as usize] {
                for &look in &looks {
                    let new = Item { prod: p, dot: 0, look };
                    if out.insert(new) {
                        queue.push_back(new);
                    }
                }
            }
        }
        out
    }

    pub fn goto(&self, state: &ItemSet, x: Symbol) -> ItemSet {
        let kernel: ItemSet = state
            .iter()
            .filter(|it| self.next(it) == Some(x))
            .map(|it| Item { dot: it.dot + 1, ..*it })
            .collect();
        self.closure(&kernel)
    }

    pub fn render_item(&self, it: &Item) -> String {
        let p = &self.g.productions[it.prod];
        let mut out = format!("[{} ->", self.g.nonterminals[p.lhs as usize]);
        for (i, s) in p.rhs.iter().enumerate() {
            if i == it.dot {
                out.push_str(" .");
            }
            out.push(' ');
            out.push_str(self.g.symbol_name(*s));
        }
        if it.dot == p.rhs.len() {
            out.push_str(" .");
        }
        let look = it.look.map_or("ε", |t| self.g.terminals[t as usize].as_str());
        out.push_str(&format!(", {}]", look));
        out
    }
}

pub fn closure(g: &Cfg, items: &ItemSet) -> ItemSet {
    LrContext::new(g).closure(items)
}

pub fn goto(g: &Cfg, state: &ItemSet, x: Symbol) -> ItemSet {
    LrContext::new(g).goto(state, x)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrMachine {
    pub states: Vec<ItemSet>,
    pub edges: BTreeMap<(usize, Symbol), usize>,
    pub initial: usize,
    /// Index of the production `S' -> $eof S $eof`.
    pub start_prod: usize,
    pub eof: u32,
}

impl LrMachine {
    pub fn state_name(i: usize) -> String {
        format!("~q{}", i)
    }

    pub fn succ(&self, p: usize, x: Symbol) -> Option<usize> {
        self.edges.get(&(p, x)).copied()
    }

    /// The states visited when reading `word` from `p`, excluding `p`.
    pub fn walk(&self, p: usize, word: &[Symbol]) -> Option<Vec<usize>> {
        let mut cur = p;
        let mut out = Vec::with_capacity(word.len());
        for &x in word {
            cur = self.succ(cur, x)?;
            out.push(cur);
        }
        Some(out)
    }

    /// States holding `[S' -> $eof S . $eof, ε]`.
    pub fn accepting(&self) -> BTreeSet<usize> {
        let it = Item {
            prod: self.start_prod,
            dot: 2,
            look: None,
        };
        (0..self.states.len()).filter(|&i| self.states[i].contains(&it)).collect()
    }
}

/// Finds the augmenting production `S' -> $eof S $eof` of the start symbol.
pub fn augmented_start(g: &Cfg) -> Result<(usize, u32)> {
    let eof = g.terminal(EOF_NAME).ok_or(Error::NotAugmented)?;
    let prods: Vec<usize> = (0..g.productions.len())
        .filter(|&i| g.productions[i].lhs == g.start)
        .collect();
    let [i] = prods[..] else {
        return Err(Error::NotAugmented);
    };
    match g.productions[i].rhs[..] {
        [Symbol::T(a), Symbol::N(_), Symbol::T(b)] if a == eof && b == eof => Ok((i, eof)),
        _ => Err(Error::NotAugmented),
    }
}

/// The canonical LR(1) machine. The initial state is the closure of
/// `[S' -> $eof . S $eof, ε]`: the leading marker counts as read.
pub fn build_lr_machine(g: &Cfg) -> Result<LrMachine> {
    g.check()?;
    let (start_prod, eof) = augmented_start(g)?;
    let ctx = LrContext::new(g);
    let init = ctx.closure(&BTreeSet::from([Item {
        prod: start_prod,
        dot: 1,
        look: None,
    }]));
    let symbols: Vec<Symbol> = (0..g.terminals.len() as u32)
        .map(Symbol::T)
        .chain((0..g.nonterminals.len() as u32).map(Symbol::N))
        .collect();
    let mut states = vec![init.clone()];
    let mut index: HashMap<ItemSet, usize> = HashMap::from([(init, 0)]);
    let mut edges = BTreeMap::new();
    let mut i = 0;
    while i < states.len() {
        let next: BTreeSet<Symbol> = states[i].iter().filter_map(|it| ctx.next(it)).collect();
        for &x in symbols.iter().filter(|x| next.contains(x)) {
            let tgt = ctx.goto(&states[i], x);
            if tgt.is_empty() {
                continue;
            }
            let j = match index.get(&tgt) {
                Some(&j) => j,
                None => {
                    states.push(tgt.clone());
                    index.insert(tgt, states.len() - 1);
                    states.len() - 1
                }
            };
            edges.insert((i, x), j);
        }
        i += 1;
    }
    Ok(LrMachine {
        states,
        edges,
        initial: 0,
        start_prod,
        eof,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum ConflictKind {
    ShiftReduce,
    ReduceReduce,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrConflict {
    pub kind: ConflictKind,
    /// Machine state on top of both left sides.
    pub state: usize,
    pub lookahead: Option<String>,
    pub witnesses: (String, String),
}

impl fmt::Display for LrConflict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            ConflictKind::ShiftReduce => "shift/reduce",
            ConflictKind::ReduceReduce => "reduce/reduce",
        };
        write!(
            f,
            "{} conflict in {} on {}: {} vs {}",
            kind,
            LrMachine::state_name(self.state),
            self.lookahead.as_deref().unwrap_or("ε"),
            self.witnesses.0,
            self.witnesses.1
        )
    }
}
