//! Graphviz export. Output is deterministic: nodes in id order, edges in
//! (source, event, target) order.

use std::fmt::Write;

use crate::automaton::Automaton;
use crate::observer::Observer;
use crate::twin::{PairEvent, TwinPlant};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

fn attrs(list: &[String]) -> String {
    if list.is_empty() {
        String::new()
    } else {
        format!(" [{}]", list.join(", "))
    }
}

/// Initial states bold, fault states double-circled, secret states shaded,
/// unobservable transitions dashed.
pub fn automaton(g: &Automaton) -> String {
    let mut out = String::from("digraph automaton {\n  rankdir=LR;\n");
    for x in g.states() {
        let fault = g.fault_states().is_some_and(|f| f.contains(&x));
        let secret = g.secret().is_some_and(|s| s.contains(&x));
        let mut a = vec![format!(
            "shape={}",
            if fault { "doublecircle" } else { "circle" }
        )];
        let mut style = Vec::new();
        if g.initial().contains(&x) {
            style.push("bold");
        }
        if secret {
            style.push("filled");
            a.push("fillcolor=gray80".into());
        }
        if !style.is_empty() {
            a.push(format!("style={}", quote(&style.join(","))));
        }
        let _ = writeln!(out, "  {}{};", quote(g.name(x)), attrs(&a));
    }
    for (x, e, y) in g.transitions() {
        let mut a = vec![format!("label={}", quote(g.alphabet().name(e)))];
        if !g.alphabet().is_observable(e) {
            a.push("style=dashed".into());
        }
        let _ = writeln!(
            out,
            "  {} -> {}{};",
            quote(g.name(x)),
            quote(g.name(y)),
            attrs(&a)
        );
    }
    out.push_str("}\n");
    out
}

/// Observer states appear as `q0, q1, ...` labelled with their estimate.
pub fn observer(obs: &Observer, g: &Automaton) -> String {
    let mut out = String::from("digraph observer {\n  rankdir=LR;\n");
    for (i, q) in obs.states().iter().enumerate() {
        let mut a = vec![
            "shape=box".to_string(),
            format!("label={}", quote(&g.format_set(q))),
        ];
        if i == obs.initial() {
            a.push("style=bold".into());
        }
        let _ = writeln!(out, "  q{i}{};", attrs(&a));
    }
    for i in 0..obs.len() {
        for (e, j) in obs.edges(i) {
            let _ = writeln!(
                out,
                "  q{i} -> q{j} [label={}];",
                quote(g.alphabet().name(e))
            );
        }
    }
    out.push_str("}\n");
    out
}

/// Pair states appear as `p0, p1, ...` labelled `(x1,x2)`; one-sided moves
/// are dashed.
pub fn twin_plant(tp: &TwinPlant, g: &Automaton) -> String {
    let mut out = String::from("digraph twin_plant {\n  rankdir=LR;\n");
    for (i, &(a, b)) in tp.pairs().iter().enumerate() {
        let label = format!("({},{})", g.name(a), g.name(b));
        let mut at = vec![format!("label={}", quote(&label))];
        if tp.initial().contains(&i) {
            at.push("style=bold".into());
        }
        let _ = writeln!(out, "  p{i}{};", attrs(&at));
    }
    for i in 0..tp.len() {
        for &(ev, j) in tp.successors(i) {
            let mut at = vec![format!("label={}", quote(&ev.render(g)))];
            if !matches!(ev, PairEvent::Both(_)) {
                at.push("style=dashed".into());
            }
            let _ = writeln!(out, "  p{i} -> p{j}{};", attrs(&at));
        }
    }
    out.push_str("}\n");
    out
}
