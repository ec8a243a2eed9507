//! Line-based formats. `#` starts a comment, `_` is the empty word and the
//! symbols of an automaton stack word are joined by `.`, top first.
//!
//! ```text
//! epda
//! states: p0 p1
//! output: a
//! stack: $bot x
//! initial: p0
//! marking: p1
//! edge: p0 a $bot x.$bot p0
//! edge: p0 _ x x p1
//! ```
//!
//! Grammars use `start:`, `terminals:` and `prod: A -> x y` lines after a
//! `cfg` header; parsers use `rule: s1 p | o1 -> s2 q | o2` lines after a
//! `parser` header, with stack words growing to the right.
//!
//! Every symbol must be declared. Names starting with `~` are reserved for
//! generated symbols and rejected unless parsing leniently.

use std::collections::BTreeMap;
use std::fmt::Write;

use crate::ats::Sym;
use crate::cfg::{Cfg, EOF_NAME};
use crate::epda::{Epda, State, BOTTOM_NAME};
use crate::error::{Error, Result};
use crate::parser::{LrParser, Rule};

const EPS: &str = "_";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Names {
    /// Reject names with the reserved `~` prefix.
    #[default]
    Strict,
    /// Accept them, for reading back generated artifacts.
    Lenient,
}

type Line<'a> = (usize, &'a str, Vec<&'a str>);

/// Splits into `(line number, key, fields)` after checking the header.
fn lines<'a>(text: &'a str, header: &str) -> Result<Vec<Line<'a>>> {
    let mut out = Vec::new();
    let mut seen_header = false;
    for (i, raw) in text.lines().enumerate() {
        let l = raw.split('#').next().unwrap_or("").trim();
        if l.is_empty() {
            continue;
        }
        if !seen_header {
            if l != header {
                return Err(Error::parse(i + 1, format!("expected header `{}`", header)));
            }
            seen_header = true;
            continue;
        }
        let (key, rest) = l
            .split_once(':')
            .ok_or_else(|| Error::parse(i + 1, "expected `key: fields`"))?;
        out.push((i + 1, key.trim(), rest.split_whitespace().collect()));
    }
    if !seen_header {
        return Err(Error::parse(1, format!("missing header `{}`", header)));
    }
    Ok(out)
}

fn check_name(line: usize, name: &str, names: Names) -> Result<()> {
    if name == EPS || name.contains('.') || name.contains('|') || name == "->" {
        return Err(Error::parse(line, format!("invalid name `{}`", name)));
    }
    if names == Names::Strict && name.starts_with('~') {
        return Err(Error::parse(line, format!("`{}` uses the reserved prefix `~`", name)));
    }
    Ok(())
}

/// Declared names in order, rejecting duplicates.
fn declare<'a>(line: usize, fields: &[&'a str], names: Names, into: &mut Vec<&'a str>) -> Result<()> {
    for f in fields {
        check_name(line, f, names)?;
        if into.contains(f) {
            return Err(Error::parse(line, format!("`{}` declared twice", f)));
        }
        into.push(f);
    }
    Ok(())
}

fn lookup<T: Copy>(line: usize, table: &BTreeMap<&str, T>, name: &str, what: &str) -> Result<T> {
    table
        .get(name)
        .copied()
        .ok_or_else(|| Error::parse(line, format!("unknown {} `{}`", what, name)))
}

fn fmt_word<S: AsRef<str>>(w: &[S], sep: &str) -> String {
    if w.is_empty() {
        EPS.to_string()
    } else {
        w.iter().map(|s| s.as_ref()).collect::<Vec<_>>().join(sep)
    }
}

fn single<'a>(line: usize, key: &str, fields: &[&'a str]) -> Result<&'a str> {
    match fields {
        [x] => Ok(x),
        _ => Err(Error::parse(line, format!("`{}` takes one name", key))),
    }
}

pub fn parse_epda(text: &str, names: Names) -> Result<Epda> {
    let ls = lines(text, "epda")?;
    let (mut states, mut outputs, mut stack) = (Vec::new(), Vec::new(), Vec::new());
    let (mut initial, mut marking) = (None, Vec::new());
    for (line, key, f) in &ls {
        match *key {
            "states" => declare(*line, f, names, &mut states)?,
            "output" => declare(*line, f, names, &mut outputs)?,
            "stack" => {
                if stack.is_empty() && f.first() != Some(&BOTTOM_NAME) {
                    return Err(Error::parse(*line, format!("the first stack symbol must be `{}`", BOTTOM_NAME)));
                }
                declare(*line, f, names, &mut stack)?
            }
            "initial" => {
                if initial.is_some() {
                    return Err(Error::parse(*line, "duplicate `initial`"));
                }
                initial = Some((*line, single(*line, key, f)?));
            }
            "marking" => marking.extend(f.iter().map(|m| (*line, *m))),
            "edge" => {}
            other => return Err(Error::parse(*line, format!("unknown key `{}`", other))),
        }
    }
    let (iline, init) = initial.ok_or_else(|| Error::parse(0, "missing `initial:`"))?;
    if !states.contains(&init) {
        return Err(Error::parse(iline, format!("unknown state `{}`", init)));
    }
    if stack.is_empty() {
        stack.push(BOTTOM_NAME);
    }
    let mut a = Epda::new(states[0]);
    let st: BTreeMap<&str, State> = states.iter().map(|s| (*s, a.add_state(s))).collect();
    let ou: BTreeMap<&str, Sym> = outputs.iter().map(|s| (*s, a.add_output(s))).collect();
    let sk: BTreeMap<&str, _> = stack.iter().map(|s| (*s, a.add_stack_sym(s))).collect();
    a.initial = st[init];
    for (line, m) in marking {
        a.marking.insert(lookup(line, &st, m, "state")?);
    }
    for (line, key, f) in &ls {
        if *key != "edge" {
            continue;
        }
        let line = *line;
        let [src, label, pop, push, dst] = f[..] else {
            return Err(Error::parse(line, "expected `edge: <src> <label> <pop> <push> <dst>`"));
        };
        let word = |w: &str| -> Result<Vec<_>> {
            if w == EPS {
                return Ok(vec![]);
            }
            w.split('.').map(|s| lookup(line, &sk, s, "stack symbol")).collect()
        };
        let e = crate::epda::Edge::new(
            lookup(line, &st, src, "state")?,
            if label == EPS { None } else { Some(lookup(line, &ou, label, "output")?) },
            word(pop)?,
            word(push)?,
            lookup(line, &st, dst, "state")?,
        );
        a.edges.push(e);
    }
    Ok(a)
}

pub fn write_epda(a: &Epda) -> String {
    let mut out = String::from("epda\n");
    writeln!(out, "states: {}", a.states.join(" ")).unwrap();
    writeln!(out, "output: {}", a.outputs.join(" ")).unwrap();
    writeln!(out, "stack: {}", a.stack.join(" ")).unwrap();
    writeln!(out, "initial: {}", a.state_name(a.initial)).unwrap();
    let marking: Vec<&str> = a.marking.iter().map(|s| a.state_name(*s)).collect();
    writeln!(out, "marking: {}", marking.join(" ")).unwrap();
    for e in &a.edges {
        let pop: Vec<&str> = e.pop.iter().map(|s| a.stack_name(*s)).collect();
        let push: Vec<&str> = e.push.iter().map(|s| a.stack_name(*s)).collect();
        writeln!(
            out,
            "edge: {} {} {} {} {}",
            a.state_name(e.src),
            e.label.map_or(EPS, |l| a.output_name(l)),
            fmt_word(&pop, "."),
            fmt_word(&push, "."),
            a.state_name(e.dst)
        )
        .unwrap();
    }
    out
}

/// Symbols listed under `terminals:` are terminals, every other right-hand
/// side name must be a declared nonterminal or occur on a left side.
pub fn parse_cfg(text: &str, names: Names) -> Result<Cfg> {
    let ls = lines(text, "cfg")?;
    let (mut terminals, mut nonterminals, mut start) = (Vec::new(), Vec::new(), None);
    let mut prods = Vec::new();
    for (line, key, f) in &ls {
        match *key {
            "terminals" => declare(*line, f, names, &mut terminals)?,
            "nonterminals" => declare(*line, f, names, &mut nonterminals)?,
            "start" => {
                if start.is_some() {
                    return Err(Error::parse(*line, "duplicate `start`"));
                }
                start = Some(single(*line, key, f)?);
            }
            "prod" => {
                let [lhs, "->", rhs @ ..] = &f[..] else {
                    return Err(Error::parse(*line, "expected `prod: A -> x y z`"));
                };
                check_name(*line, lhs, names)?;
                if terminals.contains(lhs) {
                    return Err(Error::parse(*line, format!("terminal `{}` on a left side", lhs)));
                }
                if !nonterminals.contains(lhs) {
                    nonterminals.push(lhs);
                }
                prods.push((*line, *lhs, rhs.to_vec()));
            }
            other => return Err(Error::parse(*line, format!("unknown key `{}`", other))),
        }
    }
    let start = start.ok_or_else(|| Error::parse(0, "missing `start:`"))?;
    check_name(0, start, names)?;
    if terminals.contains(&start) {
        return Err(Error::parse(0, format!("start symbol `{}` is a terminal", start)));
    }
    let mut g = Cfg::new(nonterminals.first().copied().unwrap_or(start));
    for t in &terminals {
        g.add_terminal(t);
    }
    for n in &nonterminals {
        g.add_nonterminal(n);
    }
    g.start = g.add_nonterminal(start);
    for (line, lhs, rhs) in prods {
        let rhs: Vec<&str> = rhs.into_iter().filter(|s| *s != EPS).collect();
        for s in &rhs {
            if g.terminal(s).is_none() && g.nonterminal(s).is_none() {
                return Err(Error::parse(line, format!("unknown symbol `{}`", s)));
            }
        }
        g.add_production_by_name(lhs, &rhs);
    }
    Ok(g)
}

pub fn write_cfg(g: &Cfg) -> String {
    let mut out = String::from("cfg\n");
    writeln!(out, "start: {}", g.nonterminals[g.start as usize]).unwrap();
    writeln!(out, "nonterminals: {}", g.nonterminals.join(" ")).unwrap();
    writeln!(out, "terminals: {}", g.terminals.join(" ")).unwrap();
    for p in &g.productions {
        let rhs = if p.rhs.is_empty() {
            String::new()
        } else {
            format!(" {}", g.render_word(&p.rhs))
        };
        writeln!(out, "prod: {} ->{}", g.nonterminals[p.lhs as usize], rhs).unwrap();
    }
    out
}

/// The end marker is the output named `$eof`, when declared.
pub fn parse_parser(text: &str, names: Names) -> Result<LrParser> {
    let ls = lines(text, "parser")?;
    let (mut stack, mut outputs) = (Vec::new(), Vec::new());
    let (mut initial, mut marking) = (None, Vec::new());
    for (line, key, f) in &ls {
        match *key {
            "stack" => declare(*line, f, names, &mut stack)?,
            "output" => declare(*line, f, Names::Lenient, &mut outputs)?,
            "initial" => initial = Some((*line, single(*line, key, f)?)),
            "marking" => marking.extend(f.iter().map(|m| (*line, *m))),
            "rule" => {}
            other => return Err(Error::parse(*line, format!("unknown key `{}`", other))),
        }
    }
    let sk: BTreeMap<&str, u32> = stack.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
    let ou: BTreeMap<&str, Sym> = outputs.iter().enumerate().map(|(i, s)| (*s, Sym(i as u32))).collect();
    let (iline, init) = initial.ok_or_else(|| Error::parse(0, "missing `initial:`"))?;
    let mut rules = Vec::new();
    for (line, key, f) in &ls {
        if *key != "rule" {
            continue;
        }
        let line = *line;
        let bad = || Error::parse(line, "expected `rule: s p | o -> s' p' | o'`");
        let arrow = f.iter().position(|x| *x == "->").ok_or_else(bad)?;
        let side = |part: &[&str]| -> Result<(Vec<u32>, Option<Sym>)> {
            let [w @ .., "|", o] = part else {
                return Err(bad());
            };
            if w.is_empty() {
                return Err(Error::parse(line, "empty stack word"));
            }
            let w = w.iter().map(|s| lookup(line, &sk, s, "stack symbol")).collect::<Result<_>>()?;
            let o = if *o == EPS { None } else { Some(lookup(line, &ou, o, "output")?) };
            Ok((w, o))
        };
        let (pop, out) = side(&f[..arrow])?;
        let (push, fixed) = side(&f[arrow + 1..])?;
        rules.push(Rule { pop, out, push, fixed });
    }
    let p = LrParser {
        stack: stack.iter().map(|s| s.to_string()).collect(),
        outputs: outputs.iter().map(|s| s.to_string()).collect(),
        eof: ou.get(EOF_NAME).copied(),
        initial: lookup(iline, &sk, init, "stack symbol")?,
        marking: marking
            .into_iter()
            .map(|(l, m)| lookup(l, &sk, m, "stack symbol"))
            .collect::<Result<_>>()?,
        rules,
    };
    p.validate()?;
    Ok(p)
}

pub fn write_parser(p: &LrParser) -> String {
    let mut out = String::from("parser\n");
    writeln!(out, "stack: {}", p.stack.join(" ")).unwrap();
    writeln!(out, "output: {}", p.outputs.join(" ")).unwrap();
    writeln!(out, "initial: {}", p.stack[p.initial as usize]).unwrap();
    let m: Vec<&str> = p.marking.iter().map(|s| p.stack[*s as usize].as_str()).collect();
    writeln!(out, "marking: {}", m.join(" ")).unwrap();
    let sym = |o: Option<Sym>| o.map_or(EPS, |s| p.outputs[s.0 as usize].as_str());
    let w = |w: &[u32]| w.iter().map(|s| p.stack[*s as usize].as_str()).collect::<Vec<_>>().join(" ");
    for r in &p.rules {
        writeln!(out, "rule: {} | {} -> {} | {}", w(&r.pop), sym(r.out), w(&r.push), sym(r.fixed)).unwrap();
    }
    out
}
