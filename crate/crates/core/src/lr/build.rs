use std::collections::BTreeSet;

use crate::ats::Sym;
use crate::cfg::{Cfg, Symbol};
use crate::error::{Error, Result};
use crate::parser::{LrParser, Rule};

use super::{ConflictKind, LrConflict, LrMachine};

/// Shift rules from terminal edges, reduce rules from items with the dot at
/// the start. Conflicts are not checked.
fn raw_parser(g: &Cfg, m: &LrMachine) -> Result<LrParser> {
    let mut rules: Vec<Rule> = Vec::new();
    let mut seen: BTreeSet<Rule> = BTreeSet::new();
    let mut add = |r: Rule| {
        if seen.insert(r.clone()) {
            rules.push(r);
        }
    };
    for (&(p, x), &q) in &m.edges {
        if let Symbol::T(a) = x {
            let fixed = (a == m.eof).then_some(Sym(a));
            add(Rule {
                pop: vec![p as u32],
                out: Some(Sym(a)),
                push: vec![p as u32, q as u32],
                fixed,
            });
        }
    }
    for (p, state) in m.states.iter().enumerate() {
        for it in state.iter().filter(|it| it.dot == 0) {
            let prod = &g.productions[it.prod];
            let path = m.walk(p, &prod.rhs).ok_or_else(|| {
                Error::Internal(format!("no path for {} from {}", g.render_production(prod), LrMachine::state_name(p)))
            })?;
            let target = m.succ(p, Symbol::N(prod.lhs)).ok_or_else(|| {
                Error::Internal(format!("no goto on {} from {}", g.nonterminals[prod.lhs as usize], LrMachine::state_name(p)))
            })?;
            let mut pop = vec![p as u32];
            pop.extend(path.iter().map(|s| *s as u32));
            let look = it.look.map(Sym);
            add(Rule {
                pop,
                out: look,
                push: vec![p as u32, target as u32],
                fixed: look,
            });
        }
    }
    let accepting: BTreeSet<u32> = m.accepting().into_iter().map(|s| s as u32).collect();
    Ok(LrParser {
        stack: (0..m.states.len()).map(LrMachine::state_name).collect(),
        outputs: g.terminals.clone(),
        eof: Some(Sym(m.eof)),
        initial: m.initial as u32,
        marking: accepting,
        rules,
    })
}

/// Pairs of rules whose left sides unify: the same output and one pop word
/// a suffix of the other.
pub fn parser_conflicts(p: &LrParser) -> Vec<LrConflict> {
    let mut out = Vec::new();
    for (i, r1) in p.rules.iter().enumerate() {
        for r2 in &p.rules[i + 1..] {
            if r1.out != r2.out || r1.pop.last() != r2.pop.last() {
                continue;
            }
            let n = r1.pop.len().min(r2.pop.len());
            if r1.pop[r1.pop.len() - n..] != r2.pop[r2.pop.len() - n..] {
                continue;
            }
            let kind = if p.is_shift(r1) || p.is_shift(r2) {
                ConflictKind::ShiftReduce
            } else {
                ConflictKind::ReduceReduce
            };
            out.push(LrConflict {
                kind,
                state: *r1.pop.last().unwrap() as usize,
                lookahead: r1.out.map(|s| p.outputs[s.0 as usize].clone()),
                witnesses: (p.render_rule(r1), p.render_rule(r2)),
            });
        }
    }
    out
}

pub fn detect_conflicts(g: &Cfg, m: &LrMachine) -> Vec<LrConflict> {
    match raw_parser(g, m) {
        Ok(p) => parser_conflicts(&p),
        Err(_) => Vec::new(),
    }
}

/// The parser of an augmented grammar and its machine.
pub fn build_parser(g: &Cfg, m: &LrMachine) -> Result<LrParser> {
    let p = raw_parser(g, m)?;
    let conflicts = parser_conflicts(&p);
    if !conflicts.is_empty() {
        return Err(Error::NotLr(conflicts));
    }
    Ok(p)
}
