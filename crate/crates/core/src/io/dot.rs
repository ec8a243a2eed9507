//! Graphviz export.

use std::fmt::Write;

use crate::cfg::{Cfg, Symbol};
use crate::epda::{Epda, StackSym, State};
use crate::lr::{LrContext, LrMachine};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn html(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

/// One node per state, one arrow per edge labelled `σ, pop / push` with
/// words top-first. The initial state is drawn bold, marking states doubled.
pub fn epda_to_dot(a: &Epda) -> String {
    let mut out = String::from("digraph epda {\n  rankdir=LR;\n");
    for (i, s) in a.states.iter().enumerate() {
        let st = State(i as u32);
        let shape = if a.marking.contains(&st) { "doublecircle" } else { "circle" };
        let bold = if st == a.initial { ", penwidth=2" } else { "" };
        writeln!(out, "  {} [shape={}{}];", quote(s), shape, bold).unwrap();
    }
    let word = |w: &[StackSym]| {
        if w.is_empty() {
            "ε".to_string()
        } else {
            w.iter().map(|s| a.stack_name(*s)).collect::<Vec<_>>().join(" ")
        }
    };
    for e in &a.edges {
        let label = format!(
            "{}, {} / {}",
            e.label.map_or("ε", |l| a.output_name(l)),
            word(&e.pop),
            word(&e.push)
        );
        writeln!(
            out,
            "  {} -> {} [label={}];",
            quote(a.state_name(e.src)),
            quote(a.state_name(e.dst)),
            quote(&label)
        )
        .unwrap();
    }
    out.push_str("}\n");
    out
}

/// Item sets as boxes. Terminal edges and items with the dot at the start,
/// the ones that become parser rules, are red.
pub fn machine_to_dot(g: &Cfg, m: &LrMachine) -> String {
    let ctx = LrContext::new(g);
    let mut out = String::from("digraph lr {\n  rankdir=LR;\n  node [shape=box, fontname=monospace];\n");
    for (i, s) in m.states.iter().enumerate() {
        let mut label = format!("<b>{}</b><br align=\"left\"/>", html(&LrMachine::state_name(i)));
        for it in s {
            let item = html(&ctx.render_item(it));
            if it.dot == 0 {
                write!(label, "<font color=\"red\">{}</font><br align=\"left\"/>", item).unwrap();
            } else {
                write!(label, "{}<br align=\"left\"/>", item).unwrap();
            }
        }
        writeln!(out, "  s{} [label=<{}>];", i, label).unwrap();
    }
    for (&(p, x), &q) in &m.edges {
        let color = if matches!(x, Symbol::T(_)) { ", color=red, fontcolor=red" } else { "" };
        writeln!(out, "  s{} -> s{} [label={}{}];", p, q, quote(g.symbol_name(x)), color).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cfg::augment;
    use crate::lr::build_lr_machine;

    #[test]
    fn epda_dot() {
        let d = epda_to_dot(&Epda::new("p"));
        assert_eq!(d.matches("->").count(), 0);
        assert_eq!(d.matches("shape=").count(), 1);

        let mut a = Epda::new("p");
        a.add_edge("p", Some("a"), &["$bot"], &["x", "$bot"], "q\"r");
        a.set_marking(&["q\"r"]);
        let d = epda_to_dot(&a);
        assert!(d.contains("a, $bot / x $bot"));
        assert!(d.contains("\"q\\\"r\" [shape=doublecircle]"));
    }

    #[test]
    fn machine_dot_marks_shifts() {
        let g = augment(&Cfg::build("S", &["a"], &[("S", "a")])).unwrap();
        let m = build_lr_machine(&g).unwrap();
        let d = machine_to_dot(&g, &m);
        let shifts = m.edges.keys().filter(|(_, x)| matches!(x, Symbol::T(_))).count();
        assert_eq!(d.matches(", color=red").count(), shifts);
        assert!(d.contains("<font color=\"red\">"));
    }
}
