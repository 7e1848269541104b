//! Observer-based verifiers.
//!
//! Each verifier scans the relevant observer (or product with one) for a
//! violating state or cycle. When several exist, the one with the smallest
//! canonical state set is reported, reached by a shortest trace.

use std::collections::BTreeSet;

use crate::automaton::{EventId, StateId, StateSet};
use crate::construct;
use crate::error::Result;
use crate::estimate::{EstimateKind, Estimator};
use crate::graph::Digraph;
use crate::observer::Observer;
use crate::verdict::{
    DiagnoserCycle, ObservationWitness, ObserverCycle, ObserverVariant, PairWitness,
    SmoothingWitness, Verdict, Witness,
};

use super::{prognosis_spec, require_unobservable_faults, secret, spec_pairs};

/// Shortest trace from the initial observer state to every state.
fn shortest_traces(obs: &Observer) -> Vec<Vec<EventId>> {
    let bfs = obs.digraph().bfs([obs.initial()]);
    (0..obs.len())
        .map(|i| bfs.path_to(i).expect("observer states are accessible").1)
        .collect()
}

/// Prefix and cycle through observer state `v`.
fn observer_cycle(dg: &Digraph<EventId>, v: usize) -> (Vec<EventId>, Vec<usize>, Vec<EventId>) {
    let (_, prefix) = dg.bfs([0]).path_to(v).expect("accessible");
    let (nodes, cycle) = dg
        .shortest_cycle_through(v, |_| true)
        .expect("state lies on a cycle");
    (prefix, nodes, cycle)
}

/// Current-state detectability: violated iff a cycle of Obs(G) passes
/// through an estimate with more than one state.
pub fn detectability_current(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let obs = est.observer();
    let dg = obs.digraph();
    let scc = dg.scc();
    let best = (0..obs.len())
        .filter(|&i| obs.state(i).len() > 1 && scc.on_cycle(i))
        .min_by(|&a, &b| obs.state(a).cmp(obs.state(b)));
    Ok(match best {
        None => Verdict::Holds,
        Some(v) => {
            let (prefix, nodes, cycle) = observer_cycle(&dg, v);
            Verdict::Violated(Witness::ObserverCycle(ObserverCycle {
                variant: ObserverVariant::Forward,
                prefix,
                cycle,
                estimates: nodes.iter().map(|&i| obs.state(i).clone()).collect(),
            }))
        }
    })
}

/// Initial-state detectability: violated iff a cycle of Obs(G_aug) passes
/// through a state whose initial-state projection has more than one state.
pub fn detectability_initial(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let aug = est.augmented();
    let obs = &aug.observer;
    let dg = obs.digraph();
    let scc = dg.scc();
    let best = (0..obs.len())
        .map(|i| (aug.initial_projection(i), i))
        .filter(|(i0, i)| i0.len() > 1 && scc.on_cycle(*i))
        .min_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| obs.state(a.1).cmp(obs.state(b.1)))
        });
    Ok(match best {
        None => Verdict::Holds,
        Some((_, v)) => {
            let (prefix, nodes, cycle) = observer_cycle(&dg, v);
            Verdict::Violated(Witness::ObserverCycle(ObserverCycle {
                variant: ObserverVariant::Augmented,
                prefix,
                cycle,
                estimates: nodes.iter().map(|&i| aug.initial_projection(i)).collect(),
            }))
        }
    })
}

/// For each observer state, the shortest trace of length at least `k`
/// reaching it, if any. Layered search over (state, min(depth, k)).
fn length_qualified(obs: &Observer, k: usize) -> Vec<Option<Vec<EventId>>> {
    let layers = k + 1;
    let node = |q: usize, d: usize| q * layers + d;
    let mut dg = Digraph::new(obs.len() * layers);
    for q in 0..obs.len() {
        for (e, r) in obs.edges(q) {
            for d in 0..layers {
                dg.add_edge(node(q, d), e, node(r, (d + 1).min(k)));
            }
        }
    }
    let bfs = dg.bfs([node(obs.initial(), 0)]);
    (0..obs.len())
        .map(|q| bfs.path_to(node(q, k)).map(|(_, labels)| labels))
        .collect()
}

/// Delayed detectability with delays (k1, k2): violated iff some q1 of
/// Obs(G) reachable by an observation of length ≥ k1 and some q2 of
/// Obs(G_R) reachable by one of length ≥ k2 share two or more states.
pub fn detectability_delayed(est: &Estimator, k1: usize, k2: usize) -> Result<Verdict> {
    est.require_assumptions()?;
    let obs = est.observer();
    let rev = &est.reversed().observer;
    let q1s = length_qualified(obs, k1);
    let q2s = length_qualified(rev, k2);
    let mut best: Option<(usize, usize)> = None;
    for (i, t1) in q1s.iter().enumerate() {
        if t1.is_none() {
            continue;
        }
        for (j, t2) in q2s.iter().enumerate() {
            if t2.is_none() || obs.state(i).intersection(rev.state(j)).nth(1).is_none() {
                continue;
            }
            let key = (obs.state(i), rev.state(j));
            if best.is_none_or(|(bi, bj)| key < (obs.state(bi), rev.state(bj))) {
                best = Some((i, j));
            }
        }
    }
    Ok(match best {
        None => Verdict::Holds,
        Some((i, j)) => Verdict::Violated(Witness::Smoothing(SmoothingWitness {
            alpha: q1s[i].clone().expect("qualified"),
            beta: q2s[j]
                .clone()
                .expect("qualified")
                .into_iter()
                .rev()
                .collect(),
            current: obs.state(i).clone(),
            reversed: rev.state(j).clone(),
        })),
    })
}

/// Diagnosability: violated iff G × Obs~(G) has a reachable cycle through a
/// pair (x, q) with x a fault state and q not contained in the fault states.
pub fn diagnosability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let g = est.model();
    require_unobservable_faults(g)?;
    let xf = g.fault_states().expect("checked");
    let obs = est.observer();
    let tilde = obs.to_automaton(g, true);
    let prod = construct::product(g, &tilde)?;
    let pa = &prod.automaton;
    let mut dg = Digraph::new(pa.num_states());
    for (x, e, y) in pa.transitions() {
        dg.add_edge(x.index(), e, y.index());
    }
    let scc = dg.scc();
    let node = |v: usize| {
        let (x, q) = prod.origins[v];
        (x, obs.state(q.index()))
    };
    let best = (0..pa.num_states())
        .filter(|&v| {
            let (x, q) = node(v);
            scc.on_cycle(v) && xf.contains(&x) && !q.is_subset(xf)
        })
        .min_by(|&a, &b| node(a).cmp(&node(b)));
    Ok(match best {
        None => Verdict::Holds,
        Some(v) => {
            let roots = pa.initial().iter().map(|x| x.index());
            let (_, prefix) = dg.bfs(roots).path_to(v).expect("accessible");
            let (nodes, cycle) = dg.shortest_cycle_through(v, |_| true).expect("on cycle");
            Verdict::Violated(Witness::DiagnoserCycle(DiagnoserCycle {
                prefix,
                cycle,
                nodes: nodes
                    .iter()
                    .map(|&n| {
                        let (x, q) = node(n);
                        (x, q.clone())
                    })
                    .collect(),
            }))
        }
    })
}

/// Distinguishability against the model's spec pairs.
pub fn distinguishability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let t = spec_pairs(est.model())?.clone();
    Ok(distinguishability_with(est, &t))
}

/// Violated iff some reachable estimate q has (q × q) ∩ T ≠ ∅. Assumes the
/// model assumptions were checked.
pub fn distinguishability_with(est: &Estimator, t: &BTreeSet<(StateId, StateId)>) -> Verdict {
    let obs = est.observer();
    let mut order: Vec<usize> = (0..obs.len()).collect();
    order.sort_by(|&a, &b| obs.state(a).cmp(obs.state(b)));
    for i in order {
        let q = obs.state(i);
        if let Some(&pair) = t.iter().find(|(a, b)| q.contains(a) && q.contains(b)) {
            let trace = shortest_traces(obs).swap_remove(i);
            return Verdict::Violated(Witness::StatePair(PairWitness {
                pair,
                trace,
                estimate: q.clone(),
            }));
        }
    }
    Verdict::Holds
}

/// Prognosability as distinguishability with T = ∂(G) × (X_N \ ℑ(G)).
pub fn prognosability(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let t = prognosis_spec(est.model())?;
    Ok(distinguishability_with(est, &t))
}

/// Current-state opacity: violated iff some reachable estimate lies inside
/// the secret.
pub fn opacity_current(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let xs = secret(est.model())?;
    let obs = est.observer();
    let best = (0..obs.len())
        .filter(|&i| obs.state(i).is_subset(xs))
        .min_by(|&a, &b| obs.state(a).cmp(obs.state(b)));
    Ok(match best {
        None => Verdict::Holds,
        Some(i) => Verdict::Violated(Witness::Observation(ObservationWitness {
            kind: EstimateKind::Current,
            trace: shortest_traces(obs).swap_remove(i),
            estimate: obs.state(i).clone(),
        })),
    })
}

/// Initial-state opacity: violated iff some reachable q of Obs(G_R) has
/// ∅ ≠ q ∩ X_0 ⊆ X_S. The witness trace is the forward observation.
pub fn opacity_initial(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let g = est.model();
    let xs = secret(g)?;
    let rev = &est.reversed().observer;
    let init = |i: usize| -> StateSet { rev.state(i).intersection(g.initial()).copied().collect() };
    let best = (0..rev.len())
        .map(|i| (init(i), i))
        .filter(|(s, _)| !s.is_empty() && s.is_subset(xs))
        .min_by(|a, b| {
            a.0.cmp(&b.0)
                .then_with(|| rev.state(a.1).cmp(rev.state(b.1)))
        });
    Ok(match best {
        None => Verdict::Holds,
        Some((estimate, i)) => {
            let mut trace = shortest_traces(rev).swap_remove(i);
            trace.reverse();
            Verdict::Violated(Witness::Observation(ObservationWitness {
                kind: EstimateKind::Initial,
                trace,
                estimate,
            }))
        }
    })
}

/// Infinite-step opacity: violated iff some reachable q1 of Obs(G) and q2 of
/// Obs(G_R) satisfy ∅ ≠ q1 ∩ q2 ⊆ X_S.
pub fn opacity_infinite(est: &Estimator) -> Result<Verdict> {
    est.require_assumptions()?;
    let xs = secret(est.model())?;
    let obs = est.observer();
    let rev = &est.reversed().observer;
    let mut best: Option<(usize, usize)> = None;
    for i in 0..obs.len() {
        for j in 0..rev.len() {
            let mut meet = obs.state(i).intersection(rev.state(j)).peekable();
            if meet.peek().is_none() || !meet.all(|x| xs.contains(x)) {
                continue;
            }
            let key = (obs.state(i), rev.state(j));
            if best.is_none_or(|(bi, bj)| key < (obs.state(bi), rev.state(bj))) {
                best = Some((i, j));
            }
        }
    }
    Ok(match best {
        None => Verdict::Holds,
        Some((i, j)) => {
            let mut beta = shortest_traces(rev).swap_remove(j);
            beta.reverse();
            Verdict::Violated(Witness::Smoothing(SmoothingWitness {
                alpha: shortest_traces(obs).swap_remove(i),
                beta,
                current: obs.state(i).clone(),
                reversed: rev.state(j).clone(),
            }))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::{Automaton, AutomatonBuilder};
    use crate::fixtures;

    fn est(name: &str) -> Estimator {
        Estimator::new(fixtures::load(name)).unwrap()
    }

    fn set(g: &Automaton, names: &[&str]) -> StateSet {
        names.iter().map(|n| g.state_id(n).unwrap()).collect()
    }

    fn with_secret(name: &str, secret: &[&str]) -> Estimator {
        let g = fixtures::load(name);
        let s = set(&g, secret);
        Estimator::new(g.with_secret(s).unwrap()).unwrap()
    }

    fn with_spec(name: &str, pairs: &[(&str, &str)]) -> Estimator {
        let g = fixtures::load(name);
        let p: Vec<_> = pairs
            .iter()
            .map(|(a, b)| (g.state_id(a).unwrap(), g.state_id(b).unwrap()))
            .collect();
        Estimator::new(g.with_spec_pairs(p).unwrap().0).unwrap()
    }

    /// Fully observable deterministic 3-cycle.
    fn ring() -> Automaton {
        let mut b = AutomatonBuilder::new();
        let s: Vec<_> = (0..3).map(|i| b.add_state(i.to_string())).collect();
        let a = b.add_event("a", true).unwrap();
        for i in 0..3 {
            b.add_transition(s[i], a, s[(i + 1) % 3]);
        }
        b.add_initial(s[0]).secret([]);
        b.build().unwrap().0
    }

    #[test]
    fn current_detectability() {
        let f1 = est("F1");
        match detectability_current(&f1).unwrap() {
            Verdict::Violated(Witness::ObserverCycle(c)) => {
                let q = set(f1.model(), &["2", "3"]);
                assert_eq!(c.estimates, vec![q.clone(), q]);
                assert_eq!(f1.model().alphabet().format(&c.cycle), "b");
                assert_eq!(f1.model().alphabet().format(&c.prefix), "a");
            }
            other => panic!("{other:?}"),
        }
        assert!(detectability_current(&est("F6")).unwrap().holds());
        assert!(detectability_current(&Estimator::new(ring()).unwrap())
            .unwrap()
            .holds());
    }

    #[test]
    fn initial_detectability() {
        assert!(!detectability_initial(&est("F5")).unwrap().holds());
        assert!(detectability_initial(&est("F5b")).unwrap().holds());
        for name in ["F1", "F2a", "F3a", "F4", "F6"] {
            assert!(detectability_initial(&est(name)).unwrap().holds(), "{name}");
        }
    }

    #[test]
    fn delayed_detectability() {
        assert!(detectability_delayed(&est("F6"), 1, 1).unwrap().holds());
        let f1 = est("F1");
        match detectability_delayed(&f1, 0, 0).unwrap() {
            Verdict::Violated(Witness::Smoothing(w)) => assert!(w.delayed().len() > 1),
            other => panic!("{other:?}"),
        }
        assert!(!detectability_delayed(&f1, 3, 3).unwrap().holds());
        let r = Estimator::new(ring()).unwrap();
        assert!(detectability_delayed(&r, 0, 0).unwrap().holds());
    }

    #[test]
    fn diagnosability_fixtures() {
        let f2a = est("F2a");
        match diagnosability(&f2a).unwrap() {
            Verdict::Violated(Witness::DiagnoserCycle(c)) => {
                let g = f2a.model();
                let f1 = g.state_id("f1").unwrap();
                assert_eq!(c.nodes[0], (f1, set(g, &["n1", "f1"])));
            }
            other => panic!("{other:?}"),
        }
        assert!(diagnosability(&est("F2b")).unwrap().holds());
        assert!(diagnosability(&est("F1")).unwrap_err().is_precondition());
    }

    #[test]
    fn distinguishability_fixtures() {
        assert!(
            !distinguishability(&with_spec("F4", &[("1", "0"), ("1", "3")]))
                .unwrap()
                .holds()
        );
        assert!(distinguishability(&with_spec("F1", &[("0", "2")]))
            .unwrap()
            .holds());
        assert!(distinguishability(&with_spec("F1", &[])).unwrap().holds());
        assert!(distinguishability(&est("F1"))
            .unwrap_err()
            .is_precondition());
    }

    #[test]
    fn prognosability_fixtures() {
        assert!(!prognosability(&est("F4")).unwrap().holds());
        assert!(prognosability(&est("F4b")).unwrap().holds());
        // ε already leaves n0 (boundary, not an indicator) in the estimate.
        assert!(!prognosability(&est("F2b")).unwrap().holds());
    }

    #[test]
    fn opacity_fixtures() {
        assert!(opacity_current(&est("F3a")).unwrap().holds());
        match opacity_current(&est("F3b")).unwrap() {
            Verdict::Violated(Witness::Observation(w)) => assert_eq!(w.trace.len(), 1),
            other => panic!("{other:?}"),
        }
        assert!(!opacity_infinite(&est("F3b")).unwrap().holds());
        assert!(opacity_infinite(&est("F3a")).unwrap().holds());
        assert!(opacity_current(&est("F6")).unwrap().holds());
        match opacity_infinite(&est("F6")).unwrap() {
            Verdict::Violated(Witness::Smoothing(w)) => {
                let a = est("F6").model().alphabet().clone();
                assert_eq!(a.format(&w.alpha), "a");
                assert_eq!(a.format(&w.beta), "b");
            }
            other => panic!("{other:?}"),
        }
        let f5 = with_secret("F5", &["2"]);
        match opacity_initial(&f5).unwrap() {
            Verdict::Violated(Witness::Observation(w)) => {
                assert_eq!(f5.model().alphabet().format(&w.trace), "b");
            }
            other => panic!("{other:?}"),
        }
        let f5 = with_secret("F5", &["0", "2"]);
        match opacity_initial(&f5).unwrap() {
            Verdict::Violated(Witness::Observation(w)) => assert!(w.trace.is_empty()),
            other => panic!("{other:?}"),
        }
        assert!(opacity_initial(&with_secret("F5", &["1", "3"]))
            .unwrap()
            .holds());
        assert!(opacity_current(&with_secret("F1", &[])).unwrap().holds());
        assert!(opacity_current(&est("F1")).unwrap_err().is_precondition());
    }

    #[test]
    fn delayed_detectability_is_monotone_on_fixtures() {
        for (name, g) in fixtures::all() {
            let e = Estimator::new(g).unwrap();
            for k1 in 0..4 {
                for k2 in 0..4 {
                    if detectability_delayed(&e, k1, k2).unwrap().holds() {
                        assert!(
                            detectability_delayed(&e, k1 + 1, k2).unwrap().holds(),
                            "{name}"
                        );
                        assert!(
                            detectability_delayed(&e, k1, k2 + 1).unwrap().holds(),
                            "{name}"
                        );
                    }
                }
            }
        }
    }
}
