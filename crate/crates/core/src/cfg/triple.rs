use std::collections::{BTreeMap, BTreeSet, VecDeque};

use crate::epda::{Edge, Epda, Origin, Provenance, StackSym, State, BOTTOM};
use crate::error::Result;
use crate::util::Interner;

use super::{Cfg, Production, Symbol};

/// How the triple grammar is generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StepThreeMode {
    /// Every nonterminal and production of the construction.
    #[default]
    Full,
    /// Only productions over productive nonterminals reachable from the
    /// start symbol. Equals the trimmed `Full` grammar.
    Productive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Nt {
    Start,
    L(State, StackSym),
    L3(State, StackSym, State),
}

struct Out<'a> {
    a: &'a Epda,
    names: Interner,
    ids: BTreeMap<Nt, u32>,
    prods: Vec<Production>,
    origins: Vec<Origin>,
    queue: VecDeque<Nt>,
}

impl Out<'_> {
    fn nt(&mut self, n: Nt) -> u32 {
        if let Some(&id) = self.ids.get(&n) {
            return id;
        }
        let a = self.a;
        let name = match n {
            Nt::Start => "~S0".to_string(),
            Nt::L(p, g) => format!("~L({},{})", a.state_name(p), a.stack_name(g)),
            Nt::L3(p, g, q) => format!("~L({},{},{})", a.state_name(p), a.stack_name(g), a.state_name(q)),
        };
        let id = self.names.fresh(name);
        self.ids.insert(n, id);
        self.queue.push_back(n);
        id
    }

    fn prod(&mut self, origin: Origin, lhs: Nt, rhs: &[RhsSym]) {
        let lhs = self.nt(lhs);
        let rhs = rhs
            .iter()
            .map(|s| match s {
                RhsSym::T(t) => Symbol::T(*t),
                RhsSym::N(n) => Symbol::N(self.nt(*n)),
            })
            .collect();
        self.prods.push(Production { lhs, rhs });
        self.origins.push(origin);
    }
}

#[derive(Clone, Copy)]
enum RhsSym {
    T(u32),
    N(Nt),
}

/// The triple construction, producing every nonterminal and production.
pub fn sdpda_to_cfg(a: &Epda) -> Result<(Cfg, Provenance)> {
    sdpda_to_cfg_with(a, StepThreeMode::Full)
}

pub fn sdpda_to_cfg_with(a: &Epda, mode: StepThreeMode) -> Result<(Cfg, Provenance)> {
    a.require_sdpda()?;
    let mut out = Out {
        a,
        names: Interner::default(),
        ids: BTreeMap::new(),
        prods: Vec::new(),
        origins: Vec::new(),
        queue: VecDeque::new(),
    };
    out.nt(Nt::Start);
    match mode {
        StepThreeMode::Full => full(a, &mut out),
        StepThreeMode::Productive => productive(a, &mut out),
    }
    let g = Cfg {
        nonterminals: out.names.into_names(),
        terminals: a.outputs.clone(),
        productions: out.prods,
        start: 0,
    };
    Ok((g, Provenance { origins: out.origins }))
}

fn states(a: &Epda) -> impl Iterator<Item = State> + Clone {
    (0..a.states.len() as u32).map(State)
}

fn stack(a: &Epda) -> impl Iterator<Item = StackSym> + Clone {
    (0..a.stack.len() as u32).map(StackSym)
}

fn full(a: &Epda, out: &mut Out) {
    for p in states(a) {
        for g in stack(a) {
            out.nt(Nt::L(p, g));
        }
    }
    for p in states(a) {
        for g in stack(a) {
            for q in states(a) {
                out.nt(Nt::L3(p, g, q));
            }
        }
    }
    out.prod(Origin::Start, Nt::Start, &[RhsSym::N(Nt::L(a.initial, BOTTOM))]);
    for &p in &a.marking {
        for g in stack(a) {
            out.prod(Origin::Marking, Nt::L(p, g), &[]);
        }
    }
    for (i, e) in a.edges.iter().enumerate() {
        let o = Origin::Edge(i);
        let (p, g, q) = (e.src, e.pop[0], e.dst);
        if e.is_generating() {
            let t = e.label.unwrap().0;
            out.prod(o, Nt::L(p, g), &[RhsSym::T(t), RhsSym::N(Nt::L(q, g))]);
            for p2 in states(a) {
                out.prod(o, Nt::L3(p, g, p2), &[RhsSym::T(t), RhsSym::N(Nt::L3(q, g, p2))]);
            }
        } else if e.is_push() {
            let g2 = e.push[0];
            out.prod(o, Nt::L(p, g), &[RhsSym::N(Nt::L(q, g2))]);
            for p2 in states(a) {
                out.prod(o, Nt::L(p, g), &[RhsSym::N(Nt::L3(q, g2, p2)), RhsSym::N(Nt::L(p2, g))]);
            }
            for p2 in states(a) {
                for p1 in states(a) {
                    out.prod(
                        o,
                        Nt::L3(p, g, p1),
                        &[RhsSym::N(Nt::L3(q, g2, p2)), RhsSym::N(Nt::L3(p2, g, p1))],
                    );
                }
            }
        } else {
            out.prod(o, Nt::L3(p, g, q), &[]);
        }
    }
}

type Summaries = (BTreeMap<(State, StackSym), BTreeSet<State>>, BTreeSet<(State, StackSym)>);

/// `pops[(q, γ)]`: states reachable from `q` with `γ` on top by a
/// derivation that ends right after popping that `γ`; `marks`: pairs with a
/// marking derivation that never pops the `γ`.
fn summaries(a: &Epda, by_top: &BTreeMap<(State, StackSym), Vec<usize>>) -> Summaries {
    let mut pops: BTreeMap<(State, StackSym), BTreeSet<State>> = BTreeMap::new();
    let mut changed = true;
    while changed {
        changed = false;
        for (&(p, g), es) in by_top {
            let mut add: BTreeSet<State> = BTreeSet::new();
            for e in es.iter().map(|&i| &a.edges[i]) {
                if e.is_pop() {
                    add.insert(e.dst);
                } else if e.is_generating() {
                    add.extend(pops.get(&(e.dst, g)).into_iter().flatten());
                } else {
                    for p2 in pops.get(&(e.dst, e.push[0])).into_iter().flatten() {
                        add.extend(pops.get(&(*p2, g)).into_iter().flatten());
                    }
                }
            }
            let tgt = pops.entry((p, g)).or_default();
            let before = tgt.len();
            tgt.extend(add);
            changed |= tgt.len() != before;
        }
    }
    let mut marks: BTreeSet<(State, StackSym)> = BTreeSet::new();
    for &p in &a.marking {
        for g in stack(a) {
            marks.insert((p, g));
        }
    }
    changed = true;
    while changed {
        changed = false;
        for (&(p, g), es) in by_top {
            if marks.contains(&(p, g)) {
                continue;
            }
            let ok = es.iter().map(|&i| &a.edges[i]).any(|e| {
                if e.is_generating() {
                    marks.contains(&(e.dst, g))
                } else if e.is_push() {
                    let g2 = e.push[0];
                    marks.contains(&(e.dst, g2))
                        || pops
                            .get(&(e.dst, g2))
                            .into_iter()
                            .flatten()
                            .any(|p2| marks.contains(&(*p2, g)))
                } else {
                    false
                }
            });
            if ok {
                marks.insert((p, g));
                changed = true;
            }
        }
    }
    (pops, marks)
}

fn productive(a: &Epda, out: &mut Out) {
    let mut by_top: BTreeMap<(State, StackSym), Vec<usize>> = BTreeMap::new();
    for (i, e) in a.edges.iter().enumerate() {
        by_top.entry((e.src, e.pop[0])).or_default().push(i);
    }
    let (pops, marks) = summaries(a, &by_top);
    let pop = |q: State, g: StackSym| -> Vec<State> {
        pops.get(&(q, g)).map(|s| s.iter().copied().collect()).unwrap_or_default()
    };
    let pops_to = |q: State, g: StackSym, r: State| pops.get(&(q, g)).is_some_and(|s| s.contains(&r));

    out.queue.clear();
    if !marks.contains(&(a.initial, BOTTOM)) {
        return;
    }
    out.prod(Origin::Start, Nt::Start, &[RhsSym::N(Nt::L(a.initial, BOTTOM))]);
    while let Some(n) = out.queue.pop_front() {
        let (p, g) = match n {
            Nt::Start => continue,
            Nt::L(p, g) | Nt::L3(p, g, _) => (p, g),
        };
        if let Nt::L(..) = n {
            if a.marking.contains(&p) {
                out.prod(Origin::Marking, n, &[]);
            }
        }
        for &i in by_top.get(&(p, g)).map(Vec::as_slice).unwrap_or(&[]) {
            let e: &Edge = &a.edges[i];
            let o = Origin::Edge(i);
            let q = e.dst;
            match n {
                Nt::L(..) if e.is_generating() => {
                    if marks.contains(&(q, g)) {
                        out.prod(o, n, &[RhsSym::T(e.label.unwrap().0), RhsSym::N(Nt::L(q, g))]);
                    }
                }
                Nt::L(..) if e.is_push() => {
                    let g2 = e.push[0];
                    if marks.contains(&(q, g2)) {
                        out.prod(o, n, &[RhsSym::N(Nt::L(q, g2))]);
                    }
                    for p2 in pop(q, g2) {
                        if marks.contains(&(p2, g)) {
                            out.prod(o, n, &[RhsSym::N(Nt::L3(q, g2, p2)), RhsSym::N(Nt::L(p2, g))]);
                        }
                    }
                }
                Nt::L3(_, _, p1) if e.is_generating() => {
                    if pops_to(q, g, p1) {
                        out.prod(o, n, &[RhsSym::T(e.label.unwrap().0), RhsSym::N(Nt::L3(q, g, p1))]);
                    }
                }
                Nt::L3(_, _, p1) if e.is_push() => {
                    let g2 = e.push[0];
                    for p2 in pop(q, g2) {
                        if pops_to(p2, g, p1) {
                            out.prod(o, n, &[RhsSym::N(Nt::L3(q, g2, p2)), RhsSym::N(Nt::L3(p2, g, p1))]);
                        }
                    }
                }
                Nt::L3(_, _, p1) if e.is_pop() && q == p1 => out.prod(o, n, &[]),
                _ => {}
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ats::{BoundedLanguage, Budget};
    use crate::cfg::trim;

    fn render_set(g: &Cfg) -> BTreeSet<String> {
        g.productions.iter().map(|p| g.render_production(p)).collect()
    }

    #[test]
    fn marking_initial_without_edges() {
        let mut a = Epda::new("q0");
        a.set_marking(&["q0"]);
        let (g, prov) = sdpda_to_cfg(&a).unwrap();
        assert_eq!(g.productions.len(), 2);
        assert_eq!(prov.origins, vec![Origin::Start, Origin::Marking]);
        let l = g.bounded_language(true, 3, Budget::default());
        assert_eq!(l.words, BTreeSet::from([vec![]]));
    }

    #[test]
    fn generating_loop() {
        let mut a = Epda::new("q0");
        a.add_edge("q0", Some("a"), &["$bot"], &["$bot"], "q0");
        a.set_marking(&["q0"]);
        let (g, _) = sdpda_to_cfg(&a).unwrap();
        let l = g.bounded_language(true, 6, Budget::default());
        assert_eq!(l.words.len(), 7);
        assert_eq!(l.words, a.bounded_language(true, 6, Budget::default()).words);
    }

    #[test]
    fn productive_mode_equals_trimmed_full() {
        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["$bot"], &["$bot"], "q");
        a.add_edge("q", None, &["$bot"], &["x", "$bot"], "r");
        a.add_edge("r", Some("b"), &["x"], &["x"], "s");
        a.add_edge("s", None, &["x"], &[], "t");
        a.add_edge("t", Some("c"), &["$bot"], &["$bot"], "u");
        a.add_edge("r", Some("d"), &["x"], &["x"], "v");
        a.set_marking(&["u", "s"]);
        let (full, _) = sdpda_to_cfg(&a).unwrap();
        let (prod, _) = sdpda_to_cfg_with(&a, StepThreeMode::Productive).unwrap();
        let (tf, _) = trim(&full).unwrap();
        let (tp, _) = trim(&prod).unwrap();
        assert_eq!(render_set(&tf), render_set(&tp));
        assert_eq!(render_set(&tp), render_set(&prod));
    }
}
