//! Derived automata: synchronous product, reversal and the initial-state
//! augmentation.

use std::collections::{BTreeMap, HashMap, VecDeque};

use crate::automaton::{Alphabet, Automaton, EventId, StateId, StateSet};
use crate::error::{Error, Result};

/// An automaton whose states are pairs of states of other automata.
/// `origins[i]` is the pair behind state `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Paired {
    pub automaton: Automaton,
    pub origins: Vec<(StateId, StateId)>,
}

impl Paired {
    pub fn origin(&self, x: StateId) -> (StateId, StateId) {
        self.origins[x.index()]
    }

    pub fn state_of(&self, pair: (StateId, StateId)) -> Option<StateId> {
        self.origins.iter().position(|&p| p == pair).map(StateId)
    }

    /// Projection of a set of pair states to the first component.
    pub fn first(&self, set: &StateSet) -> StateSet {
        set.iter().map(|&x| self.origins[x.index()].0).collect()
    }

    /// Projection of a set of pair states to the second component.
    pub fn second(&self, set: &StateSet) -> StateSet {
        set.iter().map(|&x| self.origins[x.index()].1).collect()
    }
}

/// Pair origins, transition relation and initial states of an explored
/// pair construction.
type Explored = (
    Vec<(StateId, StateId)>,
    Vec<BTreeMap<EventId, StateSet>>,
    StateSet,
);

/// Accessible part of a pair construction, explored breadth first from
/// `initial` with events in id order.
fn explore(
    initial: impl IntoIterator<Item = (StateId, StateId)>,
    events: &[EventId],
    succ: impl Fn((StateId, StateId), EventId) -> Vec<(StateId, StateId)>,
) -> Explored {
    let mut index: HashMap<(StateId, StateId), usize> = HashMap::new();
    let mut origins = Vec::new();
    let mut queue = VecDeque::new();
    let mut init = StateSet::new();
    let mut intern = |p, origins: &mut Vec<_>, queue: &mut VecDeque<usize>| {
        *index.entry(p).or_insert_with(|| {
            origins.push(p);
            queue.push_back(origins.len() - 1);
            origins.len() - 1
        })
    };
    for p in initial {
        init.insert(StateId(intern(p, &mut origins, &mut queue)));
    }
    let mut delta: Vec<BTreeMap<EventId, StateSet>> = Vec::new();
    while let Some(i) = queue.pop_front() {
        let p = origins[i];
        let mut out = BTreeMap::new();
        for &e in events {
            let targets: StateSet = succ(p, e)
                .into_iter()
                .map(|q| StateId(intern(q, &mut origins, &mut queue)))
                .collect();
            if !targets.is_empty() {
                out.insert(e, targets);
            }
        }
        if delta.len() <= i {
            delta.resize(i + 1, BTreeMap::new());
        }
        delta[i] = out;
    }
    delta.resize(origins.len(), BTreeMap::new());
    (origins, delta, init)
}

fn pair_names(g1: &Automaton, g2: &Automaton, origins: &[(StateId, StateId)]) -> Vec<String> {
    origins
        .iter()
        .map(|&(a, b)| format!("({},{})", g1.name(a), g2.name(b)))
        .collect()
}

/// Synchronous product: only events common to both alphabets are enabled,
/// and they move both components. Events private to one operand stay in the
/// alphabet but have no transitions. Accessible part only; no annotations.
pub fn product(g1: &Automaton, g2: &Automaton) -> Result<Paired> {
    let mut alphabet = Alphabet::new();
    let mut shared = Vec::new();
    for e in g1.alphabet().events() {
        let name = g1.alphabet().name(e);
        let obs = g1.alphabet().is_observable(e);
        if let Some(e2) = g2.alphabet().id(name) {
            if g2.alphabet().is_observable(e2) != obs {
                return Err(Error::Invalid(format!(
                    "event `{name}` is observable in one operand only"
                )));
            }
            shared.push((alphabet.add(name, obs)?, e, e2));
        } else {
            alphabet.add(name, obs)?;
        }
    }
    for e in g2.alphabet().events() {
        let name = g2.alphabet().name(e);
        if alphabet.id(name).is_none() {
            alphabet.add(name, g2.alphabet().is_observable(e))?;
        }
    }
    let by_id: HashMap<EventId, (EventId, EventId)> =
        shared.iter().map(|&(e, e1, e2)| (e, (e1, e2))).collect();
    let events: Vec<EventId> = shared.iter().map(|s| s.0).collect();
    let initial = g1
        .initial()
        .iter()
        .flat_map(|&a| g2.initial().iter().map(move |&b| (a, b)));
    let (origins, delta, init) = explore(initial, &events, |(a, b), e| {
        let (e1, e2) = by_id[&e];
        match (g1.successors(a, e1), g2.successors(b, e2)) {
            (Some(ys), Some(zs)) => ys
                .iter()
                .flat_map(|&y| zs.iter().map(move |&z| (y, z)))
                .collect(),
            _ => Vec::new(),
        }
    });
    let names = pair_names(g1, g2, &origins);
    Ok(Paired {
        automaton: Automaton::from_parts(names, alphabet, delta, init),
        origins,
    })
}

/// G_R: every transition flipped and every state initial. Secret and spec
/// annotations carry over; the fault partition does not.
pub fn reverse(g: &Automaton) -> Automaton {
    let mut delta = vec![BTreeMap::<EventId, StateSet>::new(); g.num_states()];
    for (x, e, y) in g.transitions() {
        delta[y.index()].entry(e).or_default().insert(x);
    }
    let names = g.states().map(|x| g.name(x).to_string()).collect();
    let mut r = Automaton::from_parts(names, g.alphabet().clone(), delta, g.all_states());
    r.set_annotations(None, None, g.secret().cloned(), g.spec_pairs().cloned());
    r
}

/// G_aug: states (x0, x) where x is reachable from the initial state x0. The
/// first component never changes, so it records where a run started.
pub fn augment(g: &Automaton) -> Paired {
    let events: Vec<EventId> = g.alphabet().events().collect();
    let initial = g.initial().iter().map(|&x| (x, x));
    let (origins, delta, init) = explore(initial, &events, |(x0, x), e| {
        g.successors(x, e)
            .map(|ys| ys.iter().map(|&y| (x0, y)).collect())
            .unwrap_or_default()
    });
    let names = pair_names(g, g, &origins);
    let mut a = Automaton::from_parts(names, g.alphabet().clone(), delta, init);
    let lift = |set: &StateSet| -> StateSet {
        (0..origins.len())
            .filter(|&i| set.contains(&origins[i].1))
            .map(StateId)
            .collect()
    };
    a.set_annotations(
        g.fault_events().cloned(),
        g.fault_states().map(lift),
        g.secret().map(lift),
        None,
    );
    Paired {
        automaton: a,
        origins,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;
    use crate::fixtures;

    fn set(g: &Automaton, names: &[&str]) -> StateSet {
        names.iter().map(|n| g.state_id(n).unwrap()).collect()
    }

    fn ev(g: &Automaton, n: &str) -> EventId {
        g.alphabet().id(n).unwrap()
    }

    #[test]
    fn reverse_is_an_involution_on_transitions() {
        for (name, g) in fixtures::all() {
            let rr = reverse(&reverse(&g));
            let t1: Vec<_> = g.transitions().collect();
            let t2: Vec<_> = rr.transitions().collect();
            assert_eq!(t1, t2, "{name}");
            assert_eq!(g.num_states(), rr.num_states());
        }
    }

    #[test]
    fn reverse_of_f1() {
        let g = fixtures::load("F1");
        let r = reverse(&g);
        assert_eq!(
            r.successors(g.state_id("3").unwrap(), ev(&g, "a")),
            Some(&set(&g, &["1"]))
        );
        assert_eq!(r.initial(), &set(&g, &["0", "1", "2", "3"]));
    }

    #[test]
    fn augment_tags_initial_states() {
        let g = fixtures::load("F1");
        let a = augment(&g);
        let zero = g.state_id("0").unwrap();
        assert_eq!(a.first(a.automaton.initial()), set(&g, &["0"]));
        assert_eq!(a.second(a.automaton.initial()), set(&g, &["0"]));
        assert_eq!(a.origins.len(), g.num_states());
        assert!(a.origins.iter().all(|p| p.0 == zero));

        let f4 = fixtures::load("F4");
        let a = augment(&f4);
        let init = a.automaton.initial().clone();
        let reached = a
            .automaton
            .extended_step(&init, &[ev(&f4, "u"), ev(&f4, "f")])
            .unwrap();
        let target = a
            .state_of((f4.state_id("0").unwrap(), f4.state_id("2").unwrap()))
            .unwrap();
        assert_eq!(reached, [target].into_iter().collect());
    }

    #[test]
    fn product_with_fault_tracker() {
        let g = fixtures::load("F2a");
        let mut b = AutomatonBuilder::new();
        let n = b.add_state("N");
        let f = b.add_state("F");
        let a = b.add_event("a", true).unwrap();
        let fe = b.add_event("f", false).unwrap();
        b.add_transition(n, fe, f)
            .add_transition(n, a, n)
            .add_transition(f, a, f)
            .add_transition(f, fe, f)
            .add_initial(n);
        let tracker = b.build().unwrap().0;
        let p = product(&g, &tracker).unwrap();
        let mut names: Vec<_> = p.automaton.states().map(|x| p.automaton.name(x)).collect();
        names.sort();
        assert_eq!(names, ["(f1,F)", "(n0,N)", "(n1,N)"]);
    }

    #[test]
    fn product_with_self_is_diagonal_for_deterministic_models() {
        let g = fixtures::load("F3b");
        let p = product(&g, &g).unwrap();
        assert!(p.origins.iter().all(|(a, b)| a == b));
        assert_eq!(p.origins.len(), 2);
    }

    #[test]
    fn product_with_universal_automaton_is_neutral() {
        let g = fixtures::load("F1");
        let mut b = AutomatonBuilder::new();
        let s = b.add_state("s");
        for e in g.alphabet().events() {
            let id = b
                .add_event(g.alphabet().name(e), g.alphabet().is_observable(e))
                .unwrap();
            b.add_transition(s, id, s);
        }
        b.add_initial(s);
        let one = b.build().unwrap().0;
        let p = product(&g, &one).unwrap();
        assert_eq!(p.automaton.num_states(), g.num_states());
        assert_eq!(p.automaton.num_transitions(), g.num_transitions());
    }

    #[test]
    fn product_rejects_conflicting_observability() {
        let g = fixtures::load("F1");
        let mut b = AutomatonBuilder::new();
        let s = b.add_state("s");
        let u = b.add_event("u", true).unwrap();
        b.add_transition(s, u, s).add_initial(s);
        let other = b.build().unwrap().0;
        assert!(product(&g, &other).is_err());
    }

    #[test]
    fn product_blocks_private_events() {
        let g = fixtures::load("F1");
        let mut b = AutomatonBuilder::new();
        let s = b.add_state("s");
        let a = b.add_event("a", true).unwrap();
        b.add_event("z", true).unwrap();
        b.add_transition(s, a, s).add_initial(s);
        let other = b.build().unwrap().0;
        let p = product(&g, &other).unwrap();
        // u is private to F1, so 0 -u-> 1 is blocked; only 0 -a-> 2 remains.
        assert_eq!(p.automaton.num_states(), 2);
        assert_eq!(p.automaton.alphabet().len(), 4);
    }
}
