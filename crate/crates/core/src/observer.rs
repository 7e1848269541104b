//! Subset-construction observers.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::assumptions;
use crate::automaton::{Automaton, EventId, StateId, StateSet};
use crate::error::Result;
use crate::graph::Digraph;

/// Deterministic automaton over state estimates. State 0 is the initial
/// estimate; the remaining states are numbered in breadth-first discovery
/// order with events taken in id order, so numbering is canonical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Observer {
    states: Vec<StateSet>,
    index: HashMap<StateSet, usize>,
    trans: Vec<BTreeMap<EventId, usize>>,
}

/// Builds Obs(G) after checking liveness and the absence of unobservable
/// cycles.
pub fn build_observer(g: &Automaton) -> Result<Observer> {
    assumptions::require(g, false)?;
    Ok(Observer::build(g))
}

impl Observer {
    /// Builds the accessible observer of `g` without checking assumptions.
    /// The unobservable reach always terminates, so this is total.
    pub fn build(g: &Automaton) -> Self {
        let observable: Vec<EventId> = g.alphabet().observable().collect();
        let init = g.unobservable_reach(g.initial());
        let mut obs = Observer {
            states: vec![init.clone()],
            index: HashMap::from([(init, 0)]),
            trans: vec![BTreeMap::new()],
        };
        let mut queue = VecDeque::from([0]);
        while let Some(i) = queue.pop_front() {
            for &e in &observable {
                let next = g.observable_step(&obs.states[i], e);
                if next.is_empty() {
                    continue;
                }
                let j = match obs.index.get(&next) {
                    Some(&j) => j,
                    None => {
                        let j = obs.states.len();
                        obs.index.insert(next.clone(), j);
                        obs.states.push(next);
                        obs.trans.push(BTreeMap::new());
                        queue.push_back(j);
                        j
                    }
                };
                obs.trans[i].insert(e, j);
            }
        }
        obs
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn initial(&self) -> usize {
        0
    }

    pub fn state(&self, i: usize) -> &StateSet {
        &self.states[i]
    }

    pub fn states(&self) -> &[StateSet] {
        &self.states
    }

    pub fn index_of(&self, q: &StateSet) -> Option<usize> {
        self.index.get(q).copied()
    }

    pub fn successor(&self, i: usize, e: EventId) -> Option<usize> {
        self.trans[i].get(&e).copied()
    }

    pub fn edges(&self, i: usize) -> impl Iterator<Item = (EventId, usize)> + '_ {
        self.trans[i].iter().map(|(&e, &j)| (e, j))
    }

    pub fn num_transitions(&self) -> usize {
        self.trans.iter().map(BTreeMap::len).sum()
    }

    /// Follows `trace` from `from`. On failure returns the length of the
    /// longest prefix that could be followed.
    pub fn walk(&self, from: usize, trace: &[EventId]) -> std::result::Result<usize, usize> {
        let mut cur = from;
        for (k, &e) in trace.iter().enumerate() {
            cur = self.successor(cur, e).ok_or(k)?;
        }
        Ok(cur)
    }

    pub fn digraph(&self) -> Digraph<EventId> {
        Digraph::from_adjacency(
            self.trans
                .iter()
                .map(|m| m.iter().map(|(&e, &j)| (e, j)).collect())
                .collect(),
        )
    }

    /// Every observation of length ≤ `depth` the observer generates.
    pub fn observations(&self, depth: usize) -> BTreeSet<Vec<EventId>> {
        let mut out = BTreeSet::new();
        let mut frontier = vec![(Vec::new(), self.initial())];
        for d in 0..=depth {
            let mut next = Vec::new();
            for (w, i) in frontier {
                if d < depth {
                    for (e, j) in self.edges(i) {
                        let mut w2 = w.clone();
                        w2.push(e);
                        next.push((w2, j));
                    }
                }
                out.insert(w);
            }
            frontier = next;
        }
        out
    }

    /// The observer as an automaton over `g`'s alphabet, with states named
    /// by their estimates. With `unobservable_self_loops` every state also
    /// gets a self-loop on each unobservable event (the Obs~ variant used for
    /// diagnosis).
    pub fn to_automaton(&self, g: &Automaton, unobservable_self_loops: bool) -> Automaton {
        let unobservable: Vec<EventId> = g.alphabet().unobservable().collect();
        let delta = (0..self.len())
            .map(|i| {
                let mut m: BTreeMap<EventId, StateSet> = self
                    .edges(i)
                    .map(|(e, j)| (e, [StateId(j)].into_iter().collect()))
                    .collect();
                if unobservable_self_loops {
                    for &u in &unobservable {
                        m.insert(u, [StateId(i)].into_iter().collect());
                    }
                }
                m
            })
            .collect();
        let names = self.states.iter().map(|q| g.format_set(q)).collect();
        Automaton::from_parts(
            names,
            g.alphabet().clone(),
            delta,
            [StateId(0)].into_iter().collect(),
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn set(g: &Automaton, names: &[&str]) -> StateSet {
        names.iter().map(|n| g.state_id(n).unwrap()).collect()
    }

    #[test]
    fn observer_of_f1() {
        let g = fixtures::load("F1");
        let obs = build_observer(&g).unwrap();
        let a = g.alphabet().id("a").unwrap();
        let b = g.alphabet().id("b").unwrap();
        assert_eq!(obs.len(), 2);
        assert_eq!(obs.state(0), &set(&g, &["0", "1"]));
        assert_eq!(obs.state(1), &set(&g, &["2", "3"]));
        assert_eq!(obs.successor(0, a), Some(1));
        assert_eq!(obs.successor(1, b), Some(1));
        assert_eq!(obs.successor(0, b), None);
        assert_eq!(obs.num_transitions(), 2);
    }

    #[test]
    fn observer_of_f3a() {
        let g = fixtures::load("F3a");
        let obs = build_observer(&g).unwrap();
        let a = g.alphabet().id("a").unwrap();
        assert_eq!(obs.states(), &[set(&g, &["0", "2"]), set(&g, &["1", "2"])]);
        assert_eq!(obs.successor(0, a), Some(1));
        assert_eq!(obs.successor(1, a), Some(1));
    }

    #[test]
    fn deterministic_observable_model_gives_singletons() {
        let g = fixtures::load("F3b");
        let obs = build_observer(&g).unwrap();
        assert_eq!(obs.len(), g.num_states());
        assert!(obs.states().iter().all(|q| q.len() == 1));
    }

    #[test]
    fn walk_reports_generable_prefix() {
        let g = fixtures::load("F1");
        let obs = Observer::build(&g);
        let tr = g.alphabet().parse_trace("a b b").unwrap();
        assert_eq!(obs.walk(0, &tr), Ok(1));
        let tr = g.alphabet().parse_trace("a a").unwrap();
        assert_eq!(obs.walk(0, &tr), Err(1));
    }

    #[test]
    fn tilde_variant_adds_unobservable_self_loops() {
        let g = fixtures::load("F2a");
        let obs = Observer::build(&g);
        let tilde = obs.to_automaton(&g, true);
        let f = g.alphabet().id("f").unwrap();
        for x in tilde.states() {
            assert_eq!(tilde.successors(x, f), Some(&[x].into_iter().collect()));
        }
    }
}
