use crate::error::Result;
use crate::util::Interner;

use super::{Edge, Epda, Origin, Provenance, State};

/// Duplicates every state so that after a marking state is left by an
/// ε-edge, the automaton must generate before marking again.
pub fn remove_double_marking(a: &Epda) -> Result<(Epda, Provenance)> {
    a.require_sdpda()?;
    let n = a.states.len() as u32;
    let mut names = Interner::from_names(&a.states);
    let dup: Vec<State> = a
        .states
        .iter()
        .map(|s| State(names.fresh(format!("~2({})", s))))
        .collect();
    debug_assert!(dup.iter().enumerate().all(|(i, d)| d.0 == n + i as u32));
    let bar = |s: State| dup[s.0 as usize];

    let mut edges = Vec::new();
    let mut origins = Vec::new();
    for (i, e) in a.edges.iter().enumerate() {
        let mut put = |src: State, dst: State| {
            edges.push(Edge { src, dst, ..e.clone() });
            origins.push(Origin::Edge(i));
        };
        if e.label.is_some() {
            put(e.src, e.dst);
            put(bar(e.src), e.dst);
        } else {
            if a.marking.contains(&e.src) {
                put(e.src, bar(e.dst));
            } else {
                put(e.src, e.dst);
            }
            put(bar(e.src), bar(e.dst));
        }
    }
    let out = Epda {
        states: names.into_names(),
        outputs: a.outputs.clone(),
        stack: a.stack.clone(),
        edges,
        initial: a.initial,
        marking: a.marking.clone(),
    };
    Ok((out, Provenance { origins }))
}
