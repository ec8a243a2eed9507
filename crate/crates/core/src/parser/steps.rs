use std::collections::{BTreeMap, BTreeSet};

use crate::ats::Sym;
use crate::epda::{Edge, Epda, StackSym, State, BOTTOM_NAME};
use crate::error::{Error, Result};
use crate::util::Interner;

use super::{LrParser, Rule};

/// Drops every rule reading or fixing the end marker. The tops of the
/// dropped left sides become the marking set.
pub fn strip_end_marker(m: &LrParser) -> LrParser {
    let mut out = m.clone();
    let involves = |r: &Rule| m.eof.is_some() && (r.out == m.eof || r.fixed == m.eof);
    out.marking = m
        .rules
        .iter()
        .filter(|r| involves(r) && r.out == m.eof)
        .filter_map(|r| r.pop.last().copied())
        .collect();
    out.rules = m.rules.iter().filter(|r| !involves(r)).cloned().collect();
    out
}

/// Moves the fixed output into the state: tops become pairs `(p, f)`.
pub fn internalize_fixed_output(m: &LrParser) -> LrParser {
    let mut names = Interner::from_names(&m.stack);
    let mut pairs: BTreeMap<(u32, Option<Sym>), u32> = BTreeMap::new();
    let mut pair = |p: u32, f: Option<Sym>, names: &mut Interner| -> u32 {
        *pairs.entry((p, f)).or_insert_with(|| {
            let f = f.map_or("_", |s| m.outputs[s.0 as usize].as_str());
            names.fresh(format!("{}@{}", m.stack[p as usize], f))
        })
    };
    let mut rules = Vec::new();
    let mut emit = |r: &Rule, from: Option<Sym>, out: Option<Sym>, to: Option<Sym>, names: &mut Interner| {
        let (s, p) = r.pop.split_at(r.pop.len() - 1);
        let (s2, p2) = r.push.split_at(r.push.len() - 1);
        let mut pop = s.to_vec();
        pop.push(pair(p[0], from, names));
        let mut push = s2.to_vec();
        push.push(pair(p2[0], to, names));
        rules.push(Rule { pop, out, push, fixed: None });
    };
    for r in &m.rules {
        match (r.out, r.fixed) {
            (Some(a), None) => {
                emit(r, None, Some(a), None, &mut names);
                emit(r, Some(a), None, None, &mut names);
            }
            (Some(a), Some(_)) => {
                emit(r, None, Some(a), Some(a), &mut names);
                emit(r, Some(a), None, Some(a), &mut names);
            }
            (None, _) => {
                emit(r, None, None, None, &mut names);
                for s in 0..m.outputs.len() as u32 {
                    emit(r, Some(Sym(s)), None, Some(Sym(s)), &mut names);
                }
            }
        }
    }
    let initial = pair(m.initial, None, &mut names);
    let marking = m.marking.iter().map(|p| pair(*p, None, &mut names)).collect();
    LrParser {
        stack: names.into_names(),
        outputs: m.outputs.clone(),
        eof: m.eof,
        initial,
        marking,
        rules,
    }
}

/// Reads every rule `s·p | σ -> s'·p' | ε` as the edge
/// `(p, σ, reverse(s), reverse(s'), p')`.
pub fn parser_to_edpda(m: &LrParser) -> Result<Epda> {
    if let Some(i) = m.rules.iter().position(|r| r.fixed.is_some()) {
        return Err(Error::Precondition(format!("rule {} fixes output", i)));
    }
    let mut states: BTreeSet<u32> = BTreeSet::from([m.initial]);
    states.extend(&m.marking);
    let mut plain: BTreeSet<u32> = BTreeSet::new();
    for r in &m.rules {
        for w in [&r.pop, &r.push] {
            states.insert(*w.last().unwrap());
            plain.extend(&w[..w.len() - 1]);
        }
    }
    let state_id: BTreeMap<u32, State> = states.iter().enumerate().map(|(i, s)| (*s, State(i as u32))).collect();
    let mut stack_names = Interner::from_names(&[BOTTOM_NAME.to_string()]);
    let stack_id: BTreeMap<u32, StackSym> = plain
        .iter()
        .map(|s| (*s, StackSym(stack_names.intern(&m.stack[*s as usize]))))
        .collect();
    let outputs: Vec<String> = (0..m.outputs.len() as u32)
        .filter(|s| Some(Sym(*s)) != m.eof)
        .map(|s| m.outputs[s as usize].clone())
        .collect();
    let sym = |s: Sym| Sym(outputs.iter().position(|o| *o == m.outputs[s.0 as usize]).unwrap() as u32);
    let word = |w: &[u32]| -> Vec<StackSym> { w.iter().rev().map(|s| stack_id[s]).collect() };
    let edges = m
        .rules
        .iter()
        .map(|r| {
            let (s, p) = r.pop.split_at(r.pop.len() - 1);
            let (s2, p2) = r.push.split_at(r.push.len() - 1);
            Edge::new(state_id[&p[0]], r.out.map(sym), word(s), word(s2), state_id[&p2[0]])
        })
        .collect();
    Ok(Epda {
        states: states.iter().map(|s| m.stack[*s as usize].clone()).collect(),
        outputs,
        stack: stack_names.into_names(),
        edges,
        initial: state_id[&m.initial],
        marking: m.marking.iter().map(|s| state_id[s]).collect(),
    })
}
