//! Parsers: stack rewriting systems that generate output and may fix one
//! symbol of lookahead before generating it.

mod steps;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::ats::{Ats, Budget, BoundedLanguage, Language, Sym};
use crate::error::{Error, Result};

pub use steps::{internalize_fixed_output, parser_to_edpda, strip_end_marker};

/// A rule `pop | out -> push | fixed`. Stack words grow to the right; their
/// last symbol is the state.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rule {
    pub pop: Vec<u32>,
    pub out: Option<Sym>,
    pub push: Vec<u32>,
    pub fixed: Option<Sym>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LrParser {
    pub stack: Vec<String>,
    pub outputs: Vec<String>,
    /// The end-of-output marker, when part of the output alphabet.
    pub eof: Option<Sym>,
    pub initial: u32,
    /// Marking stack tops.
    pub marking: BTreeSet<u32>,
    pub rules: Vec<Rule>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParserConfig {
    /// Top at the end.
    pub stack: Vec<u32>,
    pub history: Vec<Sym>,
    pub fixed: Option<Sym>,
}

impl LrParser {
    pub fn stack_sym(&self, name: &str) -> Option<u32> {
        self.stack.iter().position(|s| s == name).map(|i| i as u32)
    }

    pub fn output(&self, name: &str) -> Option<Sym> {
        self.outputs.iter().position(|s| s == name).map(|i| Sym(i as u32))
    }

    pub fn is_shift(&self, r: &Rule) -> bool {
        r.out.is_some() && r.fixed.is_none()
    }

    /// Checks alphabets, nonempty stack words, output non-modification and
    /// that the end marker is never generated.
    pub fn validate(&self) -> Result<()> {
        let ns = self.stack.len() as u32;
        let no = self.outputs.len() as u32;
        if self.initial >= ns || self.marking.iter().any(|m| *m >= ns) {
            return Err(Error::Precondition("unknown initial or marking symbol".into()));
        }
        for (i, r) in self.rules.iter().enumerate() {
            let bad = |m: &str| Err(Error::Precondition(format!("rule {}: {}", i, m)));
            if r.pop.is_empty() || r.push.is_empty() {
                return bad("empty stack word");
            }
            if r.pop.iter().chain(&r.push).any(|s| *s >= ns) {
                return bad("unknown stack symbol");
            }
            if r.out.iter().chain(&r.fixed).any(|s| s.0 >= no) {
                return bad("unknown output symbol");
            }
            if r.fixed.is_some() && r.fixed != r.out {
                return bad("the rule modifies the output");
            }
            if r.out.is_some() && r.out == self.eof && r.fixed != self.eof {
                return bad("the end-of-output marker is generated");
            }
        }
        Ok(())
    }

    pub fn initial_config(&self) -> ParserConfig {
        ParserConfig {
            stack: vec![self.initial],
            history: vec![],
            fixed: None,
        }
    }

    pub fn render_rule(&self, r: &Rule) -> String {
        let word = |w: &[u32]| w.iter().map(|s| self.stack[*s as usize].as_str()).collect::<Vec<_>>().join("·");
        let out = |o: Option<Sym>| o.map_or("ε", |s| self.outputs[s.0 as usize].as_str()).to_string();
        format!("{} | {} -> {} | {}", word(&r.pop), out(r.out), word(&r.push), out(r.fixed))
    }

    pub fn system(&self) -> ParserSystem<'_> {
        let mut by_top: HashMap<u32, Vec<usize>> = HashMap::new();
        for (i, r) in self.rules.iter().enumerate() {
            if let Some(t) = r.pop.last() {
                by_top.entry(*t).or_default().push(i);
            }
        }
        ParserSystem { parser: self, by_top }
    }

    /// Applies `r` to `c` when enabled.
    pub fn apply(&self, r: &Rule, c: &ParserConfig) -> Option<ParserConfig> {
        let n = c.stack.len();
        if r.pop.len() > n || c.stack[n - r.pop.len()..] != r.pop[..] {
            return None;
        }
        if r.out.is_some() && c.fixed.is_some() && r.out != c.fixed {
            return None;
        }
        let mut history = c.history.clone();
        if c.fixed.is_none() {
            if let Some(o) = r.out {
                if Some(o) != self.eof {
                    history.push(o);
                }
            }
        }
        let rest = if r.out.is_some() { None } else { c.fixed };
        let fixed = match (r.fixed, rest) {
            (Some(_), Some(_)) => return None,
            (a, b) => a.or(b),
        };
        let mut stack = c.stack[..n - r.pop.len()].to_vec();
        stack.extend_from_slice(&r.push);
        Some(ParserConfig {
            stack,
            history,
            fixed,
        })
    }
}

#[derive(Debug, Clone)]
pub struct ParserSystem<'a> {
    pub parser: &'a LrParser,
    by_top: HashMap<u32, Vec<usize>>,
}

impl Ats for ParserSystem<'_> {
    type Edge = usize;
    type Config = ParserConfig;

    fn initial_config(&self) -> ParserConfig {
        self.parser.initial_config()
    }

    fn check_config(&self, c: &ParserConfig) -> Result<()> {
        let p = self.parser;
        if c.stack.is_empty() {
            return Err(Error::InvalidConfig("empty parser stack".into()));
        }
        if c.stack.iter().any(|s| *s as usize >= p.stack.len()) {
            return Err(Error::InvalidConfig("unknown stack symbol".into()));
        }
        if c.history.iter().chain(&c.fixed).any(|s| s.0 as usize >= p.outputs.len()) {
            return Err(Error::InvalidConfig("unknown output symbol".into()));
        }
        Ok(())
    }

    fn successors(&self, c: &ParserConfig) -> Vec<(usize, ParserConfig)> {
        let Some(top) = c.stack.last() else {
            return vec![];
        };
        self.by_top
            .get(top)
            .into_iter()
            .flatten()
            .filter_map(|&i| self.parser.apply(&self.parser.rules[i], c).map(|n| (i, n)))
            .collect()
    }

    fn is_marking(&self, c: &ParserConfig) -> bool {
        (c.fixed.is_none() || c.fixed == self.parser.eof)
            && c.stack.last().is_some_and(|t| self.parser.marking.contains(t))
    }

    fn state_name(&self, c: &ParserConfig) -> Option<String> {
        c.stack.last().map(|t| self.parser.stack[*t as usize].clone())
    }

    fn output(&self, c: &ParserConfig) -> Vec<Sym> {
        c.history.clone()
    }

    fn output_len(&self, c: &ParserConfig) -> usize {
        c.history.len()
    }

    fn forget_output(&self, c: &ParserConfig) -> ParserConfig {
        ParserConfig {
            history: vec![],
            ..c.clone()
        }
    }

    fn symbol_name(&self, s: Sym) -> String {
        self.parser.outputs[s.0 as usize].clone()
    }

    /// Distinct appended symbols, or one step generating while the other
    /// fixes the end marker.
    fn distinguishable(&self, from: &ParserConfig, a: &(usize, ParserConfig), b: &(usize, ParserConfig)) -> bool {
        let grows = |c: &ParserConfig| c.history.len() > from.history.len();
        let fixes_eof = |c: &ParserConfig| {
            self.parser.eof.is_some() && c.fixed == self.parser.eof && from.fixed != self.parser.eof
        };
        match (grows(&a.1), grows(&b.1)) {
            (true, true) => a.1.history.last() != b.1.history.last(),
            (true, false) => fixes_eof(&b.1),
            (false, true) => fixes_eof(&a.1),
            (false, false) => false,
        }
    }
}

impl BoundedLanguage for LrParser {
    fn bounded_language(&self, marked: bool, max_len: usize, budget: Budget) -> Language {
        crate::ats::language(&self.system(), marked, max_len, budget)
    }
}

impl fmt::Display for LrParser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{}", self.render_rule(r))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parser() -> LrParser {
        let stack = ["1", "2", "29", "30", "31", "32"].iter().map(|s| s.to_string()).collect();
        LrParser {
            stack,
            outputs: vec!["a".into(), "b".into(), "$eof".into()],
            eof: Some(Sym(2)),
            initial: 0,
            marking: BTreeSet::new(),
            rules: vec![
                Rule { pop: vec![0], out: Some(Sym(0)), push: vec![0, 1], fixed: None },
                Rule { pop: vec![2, 4, 5], out: Some(Sym(1)), push: vec![2, 3], fixed: Some(Sym(1)) },
            ],
        }
    }

    #[test]
    fn shift_rule_generates() {
        let p = parser();
        p.validate().unwrap();
        let c = p.apply(&p.rules[0], &p.initial_config()).unwrap();
        assert_eq!(c, ParserConfig { stack: vec![0, 1], history: vec![Sym(0)], fixed: None });
    }

    #[test]
    fn reduce_rule_generates_and_fixes() {
        let p = parser();
        let c = ParserConfig { stack: vec![0, 2, 4, 5], history: vec![Sym(0)], fixed: None };
        let n = p.apply(&p.rules[1], &c).unwrap();
        assert_eq!(n, ParserConfig { stack: vec![0, 2, 3], history: vec![Sym(0), Sym(1)], fixed: Some(Sym(1)) });
        let again = ParserConfig { fixed: Some(Sym(1)), ..c.clone() };
        let n = p.apply(&p.rules[1], &again).unwrap();
        assert_eq!(n.history, vec![Sym(0)]);
        assert_eq!(n.fixed, Some(Sym(1)));
        let other = ParserConfig { fixed: Some(Sym(0)), ..c };
        assert!(p.apply(&p.rules[1], &other).is_none());
    }

    #[test]
    fn validation_catches_end_marker_generation() {
        let mut p = parser();
        p.rules.push(Rule { pop: vec![1], out: Some(Sym(2)), push: vec![1, 1], fixed: None });
        assert!(p.validate().is_err());
    }
}
