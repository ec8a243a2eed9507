use crate::ats::Sym;
use crate::error::Result;
use crate::util::Interner;

use super::{Edge, Epda, Origin, Provenance, StackSym, State};

struct Builder<'a> {
    src: &'a Epda,
    states: Interner,
    edges: Vec<Edge>,
    origins: Vec<Origin>,
    circ: Option<StackSym>,
    stack: Vec<String>,
}

impl Builder<'_> {
    fn fresh(&mut self, name: String) -> State {
        State(self.states.fresh(name))
    }

    fn emit(&mut self, origin: usize, src: State, label: Option<Sym>, pop: Vec<StackSym>, push: Vec<StackSym>, dst: State) {
        self.edges.push(Edge::new(src, label, pop, push, dst));
        self.origins.push(Origin::Edge(origin));
    }

    fn circ(&mut self) -> StackSym {
        if let Some(c) = self.circ {
            return c;
        }
        let mut name = "~o".to_string();
        while self.stack.contains(&name) {
            name.push('\'');
        }
        self.stack.push(name);
        let c = StackSym(self.stack.len() as u32 - 1);
        self.circ = Some(c);
        c
    }

    /// An ε-edge `(p, ε, γ, push, q)` that is not yet simple.
    fn epsilon(&mut self, i: usize, tag: &str, p: State, g: StackSym, push: &[StackSym], q: State) {
        if push.is_empty() {
            self.emit(i, p, None, vec![g], vec![], q);
        } else if push == [g] {
            let o = self.circ();
            let m = self.fresh(format!("~1n[e{}{}]", i, tag));
            self.emit(i, p, None, vec![g], vec![o, g], m);
            self.emit(i, m, None, vec![o], vec![], q);
        } else if push.last() == Some(&g) {
            self.chain(i, tag, p, push, q);
        } else {
            let m = self.fresh(format!("~1p[e{}{}]", i, tag));
            self.emit(i, p, None, vec![g], vec![], m);
            for g2 in 0..self.src.stack.len() as u32 {
                let g2 = StackSym(g2);
                let mut w = push.to_vec();
                w.push(g2);
                let tag2 = format!("{}:{}", tag, self.src.stack_name(g2));
                self.chain(i, &tag2, m, &w, q);
            }
        }
    }

    /// Pushes `w[..n-1]` on top of `w[n-1]` one symbol at a time.
    fn chain(&mut self, i: usize, tag: &str, p: State, w: &[StackSym], q: State) {
        let n = w.len();
        let mut cur = p;
        for j in (0..n - 1).rev() {
            let top = w[j + 1];
            let next = if j == 0 {
                q
            } else {
                self.fresh(format!("~1s[e{}{}:{}]", i, tag, n - 1 - j))
            };
            self.emit(i, cur, None, vec![top], vec![w[j], top], next);
            cur = next;
        }
    }
}

/// Splits every edge into generating, pop and push edges.
pub fn to_sdpda(a: &Epda) -> Result<(Epda, Provenance)> {
    a.require_dpda()?;
    let mut b = Builder {
        src: a,
        states: Interner::from_names(&a.states),
        edges: Vec::new(),
        origins: Vec::new(),
        circ: None,
        stack: a.stack.clone(),
    };
    for (i, e) in a.edges.iter().enumerate() {
        if e.is_simple() {
            b.edges.push(e.clone());
            b.origins.push(Origin::Edge(i));
            continue;
        }
        let g = e.pop[0];
        match e.label {
            Some(l) => {
                let m = b.fresh(format!("~1i[e{}]", i));
                b.emit(i, e.src, Some(l), vec![g], vec![g], m);
                b.epsilon(i, "", m, g, &e.push, e.dst);
            }
            None => b.epsilon(i, "", e.src, g, &e.push, e.dst),
        }
    }
    let out = Epda {
        states: b.states.into_names(),
        outputs: a.outputs.clone(),
        stack: b.stack,
        edges: b.edges,
        initial: a.initial,
        marking: a.marking.clone(),
    };
    Ok((out, Provenance { origins: b.origins }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simple_input_is_kept() {
        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["$bot"], &["$bot"], "s");
        a.add_edge("s", None, &["$bot"], &["x", "$bot"], "q");
        a.add_edge("q", None, &["x"], &[], "p");
        let (s, prov) = to_sdpda(&a).unwrap();
        assert_eq!(s, a);
        assert_eq!(prov.origins, vec![Origin::Edge(0), Origin::Edge(1), Origin::Edge(2)]);
    }

    #[test]
    fn generating_push_is_split() {
        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["g"], &["h", "g"], "q");
        let (s, prov) = to_sdpda(&a).unwrap();
        assert_eq!(s.edges.len(), 2);
        assert!(s.edges[0].is_generating() && s.edges[1].is_push());
        assert_eq!(s.edges[0].dst, s.edges[1].src);
        assert_eq!(s.edges[1].dst, s.state("q").unwrap());
        assert_eq!(prov.origins, vec![Origin::Edge(0); 2]);
    }

    #[test]
    fn neutral_loop_uses_fresh_symbol() {
        let mut a = Epda::new("p");
        a.add_edge("p", None, &["$bot"], &["$bot"], "p");
        let (s, _) = to_sdpda(&a).unwrap();
        let o = s.stack_sym("~o").unwrap();
        assert_eq!(s.edges.len(), 2);
        assert_eq!(s.edges[0].push, vec![o, crate::epda::BOTTOM]);
        assert_eq!(s.edges[1].pop, vec![o]);
        assert_eq!(s.edges[1].dst, s.state("p").unwrap());
        assert!(s.require_sdpda().is_ok());
    }

    #[test]
    fn replacing_push_expands_over_the_stack_alphabet() {
        let mut a = Epda::new("p");
        a.add_edge("p", None, &["$bot"], &["x", "$bot"], "q");
        a.add_edge("q", None, &["x"], &["y", "y"], "p");
        let (s, prov) = to_sdpda(&a).unwrap();
        assert!(s.require_sdpda().is_ok());
        // pop, then for each of $bot, x, y a two-edge push chain
        assert_eq!(prov.origins.iter().filter(|o| **o == Origin::Edge(1)).count(), 1 + 3 * 2);
    }
}
