//! Fault structure: boundary states ∂(G) and indicator states ℑ(G).

use crate::assumptions::check_liveness;
use crate::automaton::{Automaton, StateSet};
use crate::error::{Precondition, Result};
use crate::graph::Digraph;
use crate::verdict::{Verdict, Witness};

/// Fault events and fault states, or the annotation that is missing.
pub(crate) fn fault_annotations(g: &Automaton) -> Result<(&StateSet, StateSet)> {
    if g.fault_events().is_none() {
        return Err(Precondition::MissingAnnotation("fault-events").into());
    }
    let xf = g
        .fault_states()
        .ok_or(Precondition::MissingAnnotation("fault-states"))?;
    Ok((xf, g.nonfault_states().expect("partition present")))
}

/// Non-fault states at which some fault event is enabled.
pub fn boundary_states(g: &Automaton) -> Result<StateSet> {
    let (_, xn) = fault_annotations(g)?;
    Ok(xn
        .into_iter()
        .filter(|&x| g.enabled(x).any(|e| g.is_fault_event(e)))
        .collect())
}

/// Non-fault states from which every sufficiently long string contains a
/// fault event. Under liveness these are exactly the X_N states that cannot
/// reach a cycle of the fault-free subgraph on X_N.
pub fn indicator_states(g: &Automaton) -> Result<StateSet> {
    let (_, xn) = fault_annotations(g)?;
    if let Verdict::Violated(Witness::DeadState(x)) = check_liveness(g) {
        return Err(Precondition::NotLive(g.name(x).to_string()).into());
    }
    let n = g.num_states();
    let mut forward = Digraph::new(n);
    let mut backward = Digraph::new(n);
    for (x, e, y) in g.transitions() {
        if xn.contains(&x) && xn.contains(&y) && !g.is_fault_event(e) {
            forward.add_edge(x.index(), (), y.index());
            backward.add_edge(y.index(), (), x.index());
        }
    }
    let in_xn: Vec<bool> = g.states().map(|x| xn.contains(&x)).collect();
    let scc = forward.scc_filtered(|v| in_xn[v]);
    let escapes = backward.bfs((0..n).filter(|&v| scc.on_cycle(v)));
    Ok(xn
        .into_iter()
        .filter(|x| !escapes.reached(x.index()))
        .collect())
}
