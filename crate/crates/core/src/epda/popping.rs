use std::collections::{BTreeMap, BTreeSet};

use crate::ats::Sym;
use crate::error::{Error, Result};
use crate::util::Interner;

use super::{Edge, Epda, StackSym, State};

/// Rewrites an extended automaton into a 1-popping one: zero-pop edges are
/// expanded over the stack alphabet, multi-pop edges sharing a source and
/// label are compiled into a trie of single pops.
pub fn edpda_to_dpda(a: &Epda) -> Result<Epda> {
    a.check_valid()?;
    let mut flat: Vec<Edge> = Vec::new();
    for e in &a.edges {
        if e.pop.is_empty() {
            for g in 0..a.stack.len() as u32 {
                let g = StackSym(g);
                let mut push = e.push.clone();
                push.push(g);
                flat.push(Edge::new(e.src, e.label, vec![g], push, e.dst));
            }
        } else {
            flat.push(e.clone());
        }
    }

    let mut groups: BTreeMap<(State, Option<Sym>), Vec<usize>> = BTreeMap::new();
    for (i, e) in flat.iter().enumerate() {
        groups.entry((e.src, e.label)).or_default().push(i);
    }

    let mut first_pops: BTreeMap<(State, StackSym), (Option<Sym>, usize)> = BTreeMap::new();
    for (&(src, label), ids) in &groups {
        for &i in ids {
            let g = flat[i].pop[0];
            if let Some(&(l2, j)) = first_pops.get(&(src, g)) {
                if l2 != label && (l2.is_none() || label.is_none()) {
                    return Err(Error::DeterminismRisk(format!(
                        "{} and {} both pop {} first",
                        a.render_edge(&flat[j]),
                        a.render_edge(&flat[i]),
                        a.stack_name(g)
                    )));
                }
            } else {
                first_pops.insert((src, g), (label, i));
            }
        }
    }

    for (&(src, _), ids) in &groups {
        let words: BTreeSet<&[StackSym]> = ids.iter().map(|&i| flat[i].pop.as_slice()).collect();
        if words.len() != ids.len() {
            return Err(Error::DeterminismRisk(format!(
                "two edges from {} pop the same word",
                a.state_name(src)
            )));
        }
        for w in &words {
            if (1..w.len()).any(|n| words.contains(&w[..n])) {
                return Err(Error::DeterminismRisk(format!(
                    "pop words of edges from {} are prefixes of each other",
                    a.state_name(src)
                )));
            }
        }
    }

    let mut names = Interner::from_names(&a.states);
    let mut nodes: BTreeMap<(State, Option<Sym>, Vec<StackSym>), State> = BTreeMap::new();
    let mut edges: Vec<Edge> = Vec::new();
    for e in &flat {
        let m = e.pop.len();
        let mut cur = e.src;
        for j in 0..m - 1 {
            let key = (e.src, e.label, e.pop[..=j].to_vec());
            if let Some(&next) = nodes.get(&key) {
                cur = next;
                continue;
            }
            let word: Vec<&str> = key.2.iter().map(|g| a.stack_name(*g)).collect();
            let next = State(names.fresh(format!(
                "~11({},{},{})",
                a.state_name(e.src),
                e.label.map_or("_", |l| a.output_name(l)),
                word.join(".")
            )));
            nodes.insert(key, next);
            let l = if j == 0 { e.label } else { None };
            edges.push(Edge::new(cur, l, vec![e.pop[j]], vec![], next));
            cur = next;
        }
        let l = if m == 1 { e.label } else { None };
        edges.push(Edge::new(cur, l, vec![e.pop[m - 1]], e.push.clone(), e.dst));
    }
    Ok(Epda {
        states: names.into_names(),
        outputs: a.outputs.clone(),
        stack: a.stack.clone(),
        edges,
        initial: a.initial,
        marking: a.marking.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_popping_input_is_a_fixpoint() {
        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["$bot"], &["x", "$bot"], "p");
        a.add_edge("p", None, &["x"], &[], "q");
        assert_eq!(edpda_to_dpda(&a).unwrap(), a);
    }

    #[test]
    fn two_pop_edge_becomes_a_chain() {
        let mut a = Epda::new("p");
        a.add_edge("p", None, &["x", "y"], &["z"], "q");
        let d = edpda_to_dpda(&a).unwrap();
        assert_eq!(d.edges.len(), 2);
        assert_eq!(d.edges[0].pop, vec![d.stack_sym("x").unwrap()]);
        assert!(d.edges[0].push.is_empty());
        assert_eq!(d.edges[1].src, d.edges[0].dst);
        assert_eq!(d.edges[1].push, vec![d.stack_sym("z").unwrap()]);
        assert_eq!(d.edges[1].dst, d.state("q").unwrap());
    }

    #[test]
    fn shared_prefix_is_merged() {
        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["x", "y"], &[], "q1");
        a.add_edge("p", Some("a"), &["x", "z"], &[], "q2");
        let d = edpda_to_dpda(&a).unwrap();
        assert_eq!(d.edges.len(), 3);
        assert_eq!(d.edges.iter().filter(|e| e.label.is_some()).count(), 1);
        assert!(d.classify().is_dpda());
    }

    #[test]
    fn zero_pop_targets_the_original_destination() {
        let mut a = Epda::new("p");
        a.add_stack_sym("x");
        a.add_edge("p", Some("a"), &[], &["x"], "q");
        let d = edpda_to_dpda(&a).unwrap();
        assert_eq!(d.edges.len(), 2);
        assert!(d.edges.iter().all(|e| e.dst == d.state("q").unwrap() && e.push.len() == 2));
    }

    #[test]
    fn epsilon_and_labelled_first_pops_collide() {
        let mut a = Epda::new("p");
        a.add_edge("p", None, &["x", "y"], &[], "q");
        a.add_edge("p", Some("a"), &["x", "z"], &[], "q");
        assert!(matches!(edpda_to_dpda(&a), Err(Error::DeterminismRisk(_))));
    }
}
