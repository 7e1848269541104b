//! The two blanket assumptions on models: liveness (A1) and absence of
//! unobservable cycles (A2).

use crate::automaton::{Automaton, EventId, StateId};
use crate::error::{Precondition, Result};
use crate::graph::Digraph;
use crate::verdict::{Verdict, Witness};

/// A1: every state has at least one outgoing transition. The witness is the
/// first dead state.
pub fn check_liveness(g: &Automaton) -> Verdict {
    match g.states().find(|&x| g.enabled(x).next().is_none()) {
        Some(x) => Verdict::Violated(Witness::DeadState(x)),
        None => Verdict::Holds,
    }
}

/// A2: the unobservable part of the transition graph is acyclic. The witness
/// is the shortest unobservable cycle through the smallest state on one.
pub fn check_no_unobservable_cycle(g: &Automaton) -> Verdict {
    let graph = unobservable_graph(g);
    let scc = graph.scc();
    let Some(v) = (0..graph.len()).find(|&v| scc.on_cycle(v)) else {
        return Verdict::Holds;
    };
    let (nodes, labels) = graph
        .shortest_cycle_through(v, |_| true)
        .expect("a node on a cycle has a closed walk");
    Verdict::Violated(Witness::ModelCycle {
        states: nodes.into_iter().map(StateId).collect(),
        events: labels,
    })
}

fn unobservable_graph(g: &Automaton) -> Digraph<EventId> {
    let mut graph = Digraph::new(g.num_states());
    for (x, e, y) in g.transitions() {
        if !g.alphabet().is_observable(e) {
            graph.add_edge(x.index(), e, y.index());
        }
    }
    graph
}

/// Fails with the first violated assumption. `skip_a2` waives the
/// unobservable-cycle check.
pub fn require(g: &Automaton, skip_a2: bool) -> Result<()> {
    if let Verdict::Violated(Witness::DeadState(x)) = check_liveness(g) {
        return Err(Precondition::NotLive(g.name(x).to_string()).into());
    }
    if !skip_a2 {
        if let Verdict::Violated(Witness::ModelCycle { states, .. }) =
            check_no_unobservable_cycle(g)
        {
            return Err(Precondition::UnobservableCycle(g.name(states[0]).to_string()).into());
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;
    use crate::fixtures;

    #[test]
    fn fixtures_satisfy_both_assumptions() {
        for (name, g) in fixtures::all() {
            assert!(check_liveness(&g).holds(), "{name}");
            assert!(check_no_unobservable_cycle(&g).holds(), "{name}");
        }
    }

    #[test]
    fn single_state_self_loop_is_live() {
        let mut b = AutomatonBuilder::new();
        let x = b.add_state("x");
        let a = b.add_event("a", true).unwrap();
        b.add_transition(x, a, x).add_initial(x);
        assert!(check_liveness(&b.build().unwrap().0).holds());
    }

    #[test]
    fn dead_state_is_reported() {
        let mut b = AutomatonBuilder::new();
        let names = ["0", "1", "2", "3"];
        let s: Vec<_> = names.iter().map(|n| b.add_state(*n)).collect();
        let a = b.add_event("a", true).unwrap();
        let bb = b.add_event("b", true).unwrap();
        let u = b.add_event("u", false).unwrap();
        b.add_transition(s[0], u, s[1])
            .add_transition(s[0], a, s[2])
            .add_transition(s[1], a, s[3])
            .add_transition(s[2], bb, s[2])
            .add_initial(s[0]);
        let g = b.build().unwrap().0;
        assert_eq!(
            check_liveness(&g),
            Verdict::Violated(Witness::DeadState(s[3]))
        );
        assert!(matches!(
            require(&g, false),
            Err(crate::Error::Precondition(Precondition::NotLive(n))) if n == "3"
        ));
    }

    #[test]
    fn unobservable_two_cycle_is_reported() {
        let mut b = AutomatonBuilder::new();
        let x0 = b.add_state("0");
        let x1 = b.add_state("1");
        let u = b.add_event("u", false).unwrap();
        b.add_transition(x0, u, x1)
            .add_transition(x1, u, x0)
            .add_initial(x0);
        let g = b.build().unwrap().0;
        assert_eq!(
            check_no_unobservable_cycle(&g),
            Verdict::Violated(Witness::ModelCycle {
                states: vec![x0, x1, x0],
                events: vec![u, u],
            })
        );
        assert!(require(&g, true).is_ok());
        assert!(require(&g, false).unwrap_err().is_precondition());
    }
}
