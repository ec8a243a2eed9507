use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};

use super::{Cfg, Production, Symbol};

/// Name of the end-of-output marker.
pub const EOF_NAME: &str = "$eof";

/// Restricts `g` to productive, then accessible, nonterminals. Returns the
/// trimmed grammar and, per kept production, its index in `g`.
pub fn trim(g: &Cfg) -> Result<(Cfg, Vec<usize>)> {
    g.check()?;
    let mut productive = vec![false; g.nonterminals.len()];
    let mut changed = true;
    while changed {
        changed = false;
        for p in &g.productions {
            if !productive[p.lhs as usize]
                && p.rhs.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(n) => productive[*n as usize],
                })
            {
                productive[p.lhs as usize] = true;
                changed = true;
            }
        }
    }
    if !productive[g.start as usize] {
        return Err(Error::EmptyLanguage);
    }
    let useful: Vec<usize> = (0..g.productions.len())
        .filter(|&i| {
            let p = &g.productions[i];
            productive[p.lhs as usize]
                && p.rhs.iter().all(|s| match s {
                    Symbol::T(_) => true,
                    Symbol::N(n) => productive[*n as usize],
                })
        })
        .collect();

    let mut reach = BTreeSet::from([g.start]);
    changed = true;
    while changed {
        changed = false;
        for &i in &useful {
            let p = &g.productions[i];
            if reach.contains(&p.lhs) {
                for s in &p.rhs {
                    if let Symbol::N(n) = s {
                        changed |= reach.insert(*n);
                    }
                }
            }
        }
    }
    let kept: Vec<usize> = useful
        .into_iter()
        .filter(|&i| reach.contains(&g.productions[i].lhs))
        .collect();

    let renum: BTreeMap<u32, u32> = (0..g.nonterminals.len() as u32)
        .filter(|n| reach.contains(n))
        .enumerate()
        .map(|(i, n)| (n, i as u32))
        .collect();
    let map = |s: &Symbol| match s {
        Symbol::T(t) => Symbol::T(*t),
        Symbol::N(n) => Symbol::N(renum[n]),
    };
    let out = Cfg {
        nonterminals: renum.keys().map(|n| g.nonterminals[*n as usize].clone()).collect(),
        terminals: g.terminals.clone(),
        productions: kept
            .iter()
            .map(|&i| {
                let p = &g.productions[i];
                Production {
                    lhs: renum[&p.lhs],
                    rhs: p.rhs.iter().map(map).collect(),
                }
            })
            .collect(),
        start: renum[&g.start],
    };
    Ok((out, kept))
}

/// Adds `S' -> $eof S $eof` with a fresh start symbol `S'`.
pub fn augment(g: &Cfg) -> Result<Cfg> {
    if g.terminal(EOF_NAME).is_some() {
        return Err(Error::MarkerCollision(EOF_NAME.to_string()));
    }
    let mut out = g.clone();
    let eof = out.add_terminal(EOF_NAME);
    let mut name = "~S'".to_string();
    while out.nonterminal(&name).is_some() {
        name.push('\'');
    }
    let s2 = out.add_nonterminal(&name);
    out.productions.push(Production {
        lhs: s2,
        rhs: vec![Symbol::T(eof), Symbol::N(g.start), Symbol::T(eof)],
    });
    out.start = s2;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ats::{BoundedLanguage, Budget};

    #[test]
    fn trim_examples() {
        let g = Cfg::build("S", &["a"], &[("S", "a")]);
        assert_eq!(trim(&g).unwrap().0, g);

        let g = Cfg::build("S", &["a"], &[("S", "a"), ("S", "A")]);
        let (t, kept) = trim(&g).unwrap();
        assert_eq!(kept, vec![0]);
        assert_eq!(t.nonterminals, vec!["S".to_string()]);

        let g = Cfg::build("S", &["a", "b"], &[("S", "a"), ("B", "b")]);
        assert_eq!(trim(&g).unwrap().1, vec![0]);

        let g = Cfg::build("S", &["a"], &[("S", "a S")]);
        assert_eq!(trim(&g), Err(Error::EmptyLanguage));
    }

    #[test]
    fn trim_is_idempotent() {
        let g = Cfg::build("S", &["a", "b"], &[("S", "A B"), ("A", "a"), ("B", "B b"), ("S", "a")]);
        let (t, _) = trim(&g).unwrap();
        assert_eq!(trim(&t).unwrap().0, t);
    }

    #[test]
    fn augment_examples() {
        let g = Cfg::build("S", &["a"], &[("S", "a")]);
        let h = augment(&g).unwrap();
        assert_eq!(h.nonterminals[h.start as usize], "~S'");
        assert_eq!(h.render_production(h.productions.last().unwrap()), "~S' -> $eof S $eof");
        assert!(matches!(augment(&h), Err(Error::MarkerCollision(_))));
        let l = h.bounded_language(true, 5, Budget::default());
        assert_eq!(
            l.words,
            BTreeSet::from([vec!["$eof".to_string(), "a".to_string(), "$eof".to_string()]])
        );
    }
}
