//! Context-free grammars.

mod trim;
mod triple;

use std::collections::{BTreeSet, VecDeque};

use crate::ats::{Ats, Budget, BoundedLanguage, Language, Sym};
use crate::error::{Error, Result};

pub use trim::{augment, trim, EOF_NAME};
pub use triple::{sdpda_to_cfg, sdpda_to_cfg_with, StepThreeMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    T(u32),
    N(u32),
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Production {
    pub lhs: u32,
    pub rhs: Vec<Symbol>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cfg {
    pub nonterminals: Vec<String>,
    pub terminals: Vec<String>,
    pub productions: Vec<Production>,
    pub start: u32,
}

/// Terminal words per nonterminal.
pub type WordSets = Vec<BTreeSet<Vec<u32>>>;

/// A 1-prefix of a terminal word: `None` is ε.
pub type First = Option<u32>;

impl Cfg {
    pub fn new(start: &str) -> Self {
        Cfg {
            nonterminals: vec![start.to_string()],
            terminals: Vec::new(),
            productions: Vec::new(),
            start: 0,
        }
    }

    /// Builds a grammar from `lhs -> rhs` pairs; right-hand sides are
    /// whitespace separated and every name listed in `terminals` is a
    /// terminal.
    pub fn build(start: &str, terminals: &[&str], prods: &[(&str, &str)]) -> Self {
        let mut g = Cfg::new(start);
        for t in terminals {
            g.add_terminal(t);
        }
        for (lhs, rhs) in prods {
            let rhs: Vec<&str> = rhs.split_whitespace().collect();
            g.add_production_by_name(lhs, &rhs);
        }
        g
    }

    pub fn nonterminal(&self, name: &str) -> Option<u32> {
        self.nonterminals.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn terminal(&self, name: &str) -> Option<u32> {
        self.terminals.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn add_nonterminal(&mut self, name: &str) -> u32 {
        self.nonterminal(name).unwrap_or_else(|| {
            self.nonterminals.push(name.to_string());
            self.nonterminals.len() as u32 - 1
        })
    }

    pub fn add_terminal(&mut self, name: &str) -> u32 {
        self.terminal(name).unwrap_or_else(|| {
            self.terminals.push(name.to_string());
            self.terminals.len() as u32 - 1
        })
    }

    /// Names are resolved as terminals first, otherwise declared as
    /// nonterminals.
    pub fn add_production_by_name(&mut self, lhs: &str, rhs: &[&str]) -> usize {
        let lhs = self.add_nonterminal(lhs);
        let rhs = rhs
            .iter()
            .map(|x| match self.terminal(x) {
                Some(t) => Symbol::T(t),
                None => Symbol::N(self.add_nonterminal(x)),
            })
            .collect();
        self.productions.push(Production { lhs, rhs });
        self.productions.len() - 1
    }

    pub fn symbol_name(&self, s: Symbol) -> &str {
        match s {
            Symbol::T(t) => &self.terminals[t as usize],
            Symbol::N(n) => &self.nonterminals[n as usize],
        }
    }

    pub fn render_production(&self, p: &Production) -> String {
        let mut out = format!("{} ->", self.nonterminals[p.lhs as usize]);
        for s in &p.rhs {
            out.push(' ');
            out.push_str(self.symbol_name(*s));
        }
        out
    }

    pub fn render_word(&self, w: &[Symbol]) -> String {
        w.iter().map(|s| self.symbol_name(*s)).collect::<Vec<_>>().join(" ")
    }

    /// Production indices grouped by left-hand side.
    pub fn by_lhs(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.nonterminals.len()];
        for (i, p) in self.productions.iter().enumerate() {
            out[p.lhs as usize].push(i);
        }
        out
    }

    pub fn check(&self) -> Result<()> {
        let (nn, nt) = (self.nonterminals.len() as u32, self.terminals.len() as u32);
        if self.start >= nn {
            return Err(Error::Precondition("start symbol is not a nonterminal".into()));
        }
        for p in &self.productions {
            let bad = p.lhs >= nn
                || p.rhs.iter().any(|s| match s {
                    Symbol::T(t) => *t >= nt,
                    Symbol::N(n) => *n >= nn,
                });
            if bad {
                return Err(Error::Precondition("production uses an unknown symbol".into()));
            }
        }
        Ok(())
    }

    /// One successor per nonterminal occurrence and applicable production.
    pub fn steps(&self, w: &[Symbol]) -> Vec<((usize, usize), Vec<Symbol>)> {
        let by_lhs = self.by_lhs();
        let mut out = Vec::new();
        for (pos, s) in w.iter().enumerate() {
            if let Symbol::N(a) = s {
                for &i in &by_lhs[*a as usize] {
                    out.push(((i, pos), self.replace(w, pos, i)));
                }
            }
        }
        out
    }

    /// Successors rewriting the rightmost nonterminal.
    pub fn rightmost_steps(&self, w: &[Symbol]) -> Vec<((usize, usize), Vec<Symbol>)> {
        let Some(pos) = w.iter().rposition(|s| matches!(s, Symbol::N(_))) else {
            return vec![];
        };
        let Symbol::N(a) = w[pos] else { unreachable!() };
        (0..self.productions.len())
            .filter(|&i| self.productions[i].lhs == a)
            .map(|i| ((i, pos), self.replace(w, pos, i)))
            .collect()
    }

    fn replace(&self, w: &[Symbol], pos: usize, prod: usize) -> Vec<Symbol> {
        let mut out = w[..pos].to_vec();
        out.extend_from_slice(&self.productions[prod].rhs);
        out.extend_from_slice(&w[pos + 1..]);
        out
    }

    pub fn system(&self) -> CfgSystem<'_> {
        CfgSystem {
            cfg: self,
            by_lhs: self.by_lhs(),
        }
    }

    /// Nonterminals deriving ε.
    pub fn nullable(&self) -> Vec<bool> {
        let mut null = vec![false; self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !null[p.lhs as usize]
                    && p.rhs.iter().all(|s| matches!(s, Symbol::N(n) if null[*n as usize]))
                {
                    null[p.lhs as usize] = true;
                    changed = true;
                }
            }
        }
        null
    }

    /// FIRST sets of the nonterminals, without ε.
    pub fn first_sets(&self) -> Vec<BTreeSet<u32>> {
        let null = self.nullable();
        let mut first = vec![BTreeSet::new(); self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut add = BTreeSet::new();
                for s in &p.rhs {
                    match s {
                        Symbol::T(t) => {
                            add.insert(*t);
                            break;
                        }
                        Symbol::N(n) => {
                            add.extend(first[*n as usize].iter().copied());
                            if !null[*n as usize] {
                                break;
                            }
                        }
                    }
                }
                let tgt = &mut first[p.lhs as usize];
                let before = tgt.len();
                tgt.extend(add);
                changed |= tgt.len() != before;
            }
        }
        first
    }

    /// `{ 1-prefix(w) : v ⇒* w, w terminal }`.
    pub fn first1(&self, v: &[Symbol]) -> BTreeSet<First> {
        first_of(v, &self.first_sets(), &self.nullable())
    }

    /// Nonterminals reachable from the start symbol.
    pub fn accessible(&self) -> BTreeSet<u32> {
        let by_lhs = self.by_lhs();
        let mut seen = BTreeSet::from([self.start]);
        let mut queue = VecDeque::from([self.start]);
        while let Some(a) = queue.pop_front() {
            for &i in &by_lhs[a as usize] {
                for s in &self.productions[i].rhs {
                    if let Symbol::N(n) = s {
                        if seen.insert(*n) {
                            queue.push_back(*n);
                        }
                    }
                }
            }
        }
        seen
    }

    /// Exact bounded languages by a least fixpoint over words of length at
    /// most `n`: `marked[A]` holds the terminal words derivable from `A`,
    /// `unmarked[A]` the prefixes of terminal prefixes of sentential forms
    /// reachable from `A`.
    pub fn bounded_sets(&self, n: usize) -> (WordSets, WordSets) {
        let nn = self.nonterminals.len();
        let live = self.accessible();
        let mut marked: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); nn];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !live.contains(&p.lhs) {
                    continue;
                }
                let words = concat_all(&p.rhs, &marked, n);
                let tgt = &mut marked[p.lhs as usize];
                let before = tgt.len();
                tgt.extend(words);
                changed |= tgt.len() != before;
            }
        }
        let mut unmarked: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::from([vec![]]); nn];
        changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                if !live.contains(&p.lhs) {
                    continue;
                }
                let mut words = BTreeSet::new();
                for i in 0..p.rhs.len() {
                    let heads = concat_all(&p.rhs[..i], &marked, n);
                    if heads.is_empty() {
                        break;
                    }
                    let tails: BTreeSet<Vec<u32>> = match p.rhs[i] {
                        Symbol::T(t) => BTreeSet::from([vec![], vec![t]]),
                        Symbol::N(x) => unmarked[x as usize].clone(),
                    };
                    for h in &heads {
                        for t in &tails {
                            if h.len() + t.len() <= n {
                                let mut w = h.clone();
                                w.extend_from_slice(t);
                                words.insert(w);
                            }
                        }
                    }
                }
                let tgt = &mut unmarked[p.lhs as usize];
                let before = tgt.len();
                for w in words {
                    for j in 0..=w.len() {
                        tgt.insert(w[..j].to_vec());
                    }
                }
                changed |= tgt.len() != before;
            }
        }
        (marked, unmarked)
    }

    /// `k`-prefixes of the terminal words derivable from each nonterminal:
    /// words shorter than `k` in full, longer ones cut to length `k`.
    pub fn first_k(&self, k: usize) -> Vec<BTreeSet<Vec<u32>>> {
        let mut sets: Vec<BTreeSet<Vec<u32>>> = vec![BTreeSet::new(); self.nonterminals.len()];
        let mut changed = true;
        while changed {
            changed = false;
            for p in &self.productions {
                let mut acc: BTreeSet<Vec<u32>> = BTreeSet::from([vec![]]);
                for x in &p.rhs {
                    let next: BTreeSet<Vec<u32>> = match x {
                        Symbol::T(t) => acc
                            .iter()
                            .map(|w| {
                                let mut w = w.clone();
                                if w.len() < k {
                                    w.push(*t);
                                }
                                w
                            })
                            .collect(),
                        Symbol::N(a) => {
                            let tails = &sets[*a as usize];
                            let mut next = BTreeSet::new();
                            if !tails.is_empty() {
                                for w in &acc {
                                    for v in tails {
                                        let mut w = w.clone();
                                        let room = k - w.len().min(k);
                                        w.extend(v.iter().take(room));
                                        next.insert(w);
                                    }
                                }
                            }
                            next
                        }
                    };
                    acc = next;
                    if acc.is_empty() {
                        break;
                    }
                }
                let tgt = &mut sets[p.lhs as usize];
                let before = tgt.len();
                tgt.extend(acc);
                changed |= tgt.len() != before;
            }
        }
        sets
    }
}

/// FIRST of a sentential form given precomputed nonterminal data.
pub fn first_of(v: &[Symbol], first: &[BTreeSet<u32>], null: &[bool]) -> BTreeSet<First> {
    let mut out = BTreeSet::new();
    for s in v {
        match s {
            Symbol::T(t) => {
                out.insert(Some(*t));
                return out;
            }
            Symbol::N(n) => {
                out.extend(first[*n as usize].iter().map(|t| Some(*t)));
                if !null[*n as usize] {
                    return out;
                }
            }
        }
    }
    out.insert(None);
    out
}

/// All concatenations `w1 … wm` with `wi ∈ M(xi)`, of length at most `n`.
fn concat_all(xs: &[Symbol], marked: &[BTreeSet<Vec<u32>>], n: usize) -> BTreeSet<Vec<u32>> {
    let mut acc: BTreeSet<Vec<u32>> = BTreeSet::from([vec![]]);
    for x in xs {
        let mut next = BTreeSet::new();
        match x {
            Symbol::T(t) => {
                for w in &acc {
                    if w.len() < n {
                        let mut w = w.clone();
                        w.push(*t);
                        next.insert(w);
                    }
                }
            }
            Symbol::N(a) => {
                for w in &acc {
                    for v in &marked[*a as usize] {
                        if w.len() + v.len() <= n {
                            let mut w = w.clone();
                            w.extend_from_slice(v);
                            next.insert(w);
                        }
                    }
                }
            }
        }
        acc = next;
        if acc.is_empty() {
            break;
        }
    }
    acc
}

impl BoundedLanguage for Cfg {
    fn bounded_language(&self, marked: bool, max_len: usize, _budget: Budget) -> Language {
        let (m, u) = self.bounded_sets(max_len);
        let set = if marked { &m } else { &u };
        Language {
            words: set[self.start as usize]
                .iter()
                .map(|w| w.iter().map(|t| self.terminals[*t as usize].clone()).collect())
                .collect(),
            complete: true,
        }
    }
}

/// Sentential forms as configurations. Edges are `(production, position)`.
#[derive(Debug, Clone)]
pub struct CfgSystem<'a> {
    pub cfg: &'a Cfg,
    by_lhs: Vec<Vec<usize>>,
}

fn terminal_prefix(w: &[Symbol]) -> Vec<Sym> {
    w.iter()
        .map_while(|s| match s {
            Symbol::T(t) => Some(Sym(*t)),
            Symbol::N(_) => None,
        })
        .collect()
}

impl Ats for CfgSystem<'_> {
    type Edge = (usize, usize);
    type Config = Vec<Symbol>;

    fn initial_config(&self) -> Vec<Symbol> {
        vec![Symbol::N(self.cfg.start)]
    }

    fn check_config(&self, c: &Vec<Symbol>) -> Result<()> {
        let ok = c.iter().all(|s| match s {
            Symbol::T(t) => (*t as usize) < self.cfg.terminals.len(),
            Symbol::N(n) => (*n as usize) < self.cfg.nonterminals.len(),
        });
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig("unknown grammar symbol".into()))
        }
    }

    fn successors(&self, c: &Vec<Symbol>) -> Vec<((usize, usize), Vec<Symbol>)> {
        let mut out = Vec::new();
        for (pos, s) in c.iter().enumerate() {
            if let Symbol::N(a) = s {
                for &i in &self.by_lhs[*a as usize] {
                    out.push(((i, pos), self.cfg.replace(c, pos, i)));
                }
            }
        }
        out
    }

    fn is_marking(&self, c: &Vec<Symbol>) -> bool {
        c.iter().all(|s| matches!(s, Symbol::T(_)))
    }

    fn state_name(&self, c: &Vec<Symbol>) -> Option<String> {
        c.iter().find_map(|s| match s {
            Symbol::N(n) => Some(self.cfg.nonterminals[*n as usize].clone()),
            Symbol::T(_) => None,
        })
    }

    fn output(&self, c: &Vec<Symbol>) -> Vec<Sym> {
        terminal_prefix(c)
    }

    fn unmarked_outputs(&self, c: &Vec<Symbol>) -> Vec<Vec<Sym>> {
        let w = terminal_prefix(c);
        (0..=w.len()).map(|i| w[..i].to_vec()).collect()
    }

    fn forget_output(&self, c: &Vec<Symbol>) -> Vec<Symbol> {
        let n = terminal_prefix(c).len();
        c[n..].to_vec()
    }

    fn symbol_name(&self, s: Sym) -> String {
        self.cfg.terminals[s.0 as usize].clone()
    }
}

/// Brute-force FIRST: 1-prefixes of terminal words of length at most `n`
/// derivable from `v`, by the grammar's bounded fixpoint.
pub fn first1_bounded(g: &Cfg, v: &[Symbol], n: usize) -> BTreeSet<First> {
    let (m, _) = {
        let mut h = g.clone();
        let s = h.add_nonterminal("~first");
        h.productions.push(Production { lhs: s, rhs: v.to_vec() });
        h.start = s;
        h.bounded_sets(n)
    };
    let s = m.len() - 1;
    m[s].iter().map(|w| w.first().copied()).collect()
}
