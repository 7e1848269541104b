//! The twin plant: a pair automaton that runs two copies of the model in
//! lockstep on observable events and lets each copy move alone on
//! unobservable ones. Its reachable pairs are exactly the pairs of states
//! reachable by observation-equivalent strings.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{Automaton, EventId, StateId, StateSet};
use crate::graph::Digraph;

/// Event of the twin plant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum PairEvent {
    /// (σ,σ) for an observable σ.
    Both(EventId),
    /// (σ,ε) for an unobservable σ.
    Left(EventId),
    /// (ε,σ) for an unobservable σ.
    Right(EventId),
}

impl PairEvent {
    /// The observable event this move shows, if any.
    pub fn observation(self) -> Option<EventId> {
        match self {
            PairEvent::Both(e) => Some(e),
            _ => None,
        }
    }

    pub fn left(self) -> Option<EventId> {
        match self {
            PairEvent::Both(e) | PairEvent::Left(e) => Some(e),
            PairEvent::Right(_) => None,
        }
    }

    pub fn right(self) -> Option<EventId> {
        match self {
            PairEvent::Both(e) | PairEvent::Right(e) => Some(e),
            PairEvent::Left(_) => None,
        }
    }

    pub fn render(self, g: &Automaton) -> String {
        let n = |e: EventId| g.alphabet().name(e).to_string();
        match self {
            PairEvent::Both(e) => format!("({},{})", n(e), n(e)),
            PairEvent::Left(e) => format!("({},ε)", n(e)),
            PairEvent::Right(e) => format!("(ε,{})", n(e)),
        }
    }
}

/// Accessible twin plant. Pairs are numbered in breadth-first discovery
/// order from X_0 × X_0.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinPlant {
    pairs: Vec<(StateId, StateId)>,
    index: HashMap<(StateId, StateId), usize>,
    succ: Vec<Vec<(PairEvent, usize)>>,
    initial: Vec<usize>,
}

impl TwinPlant {
    pub fn build(g: &Automaton) -> Self {
        let mut tp = TwinPlant {
            pairs: Vec::new(),
            index: HashMap::new(),
            succ: Vec::new(),
            initial: Vec::new(),
        };
        let mut queue = VecDeque::new();
        for &a in g.initial() {
            for &b in g.initial() {
                let i = tp.intern((a, b), &mut queue);
                tp.initial.push(i);
            }
        }
        let empty = StateSet::new();
        while let Some(i) = queue.pop_front() {
            let (x1, x2) = tp.pairs[i];
            let mut out = Vec::new();
            for e in g.alphabet().events() {
                let y1 = g.successors(x1, e).unwrap_or(&empty);
                let y2 = g.successors(x2, e).unwrap_or(&empty);
                if g.alphabet().is_observable(e) {
                    for &a in y1 {
                        for &b in y2 {
                            out.push((PairEvent::Both(e), (a, b)));
                        }
                    }
                } else {
                    for &a in y1 {
                        out.push((PairEvent::Left(e), (a, x2)));
                    }
                    for &b in y2 {
                        out.push((PairEvent::Right(e), (x1, b)));
                    }
                }
            }
            let edges = out
                .into_iter()
                .map(|(ev, p)| (ev, tp.intern(p, &mut queue)))
                .collect();
            tp.succ[i] = edges;
        }
        tp
    }

    fn intern(&mut self, p: (StateId, StateId), queue: &mut VecDeque<usize>) -> usize {
        if let Some(&i) = self.index.get(&p) {
            return i;
        }
        let i = self.pairs.len();
        self.pairs.push(p);
        self.index.insert(p, i);
        self.succ.push(Vec::new());
        queue.push_back(i);
        i
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(StateId, StateId)] {
        &self.pairs
    }

    pub fn pair(&self, i: usize) -> (StateId, StateId) {
        self.pairs[i]
    }

    pub fn index_of(&self, p: (StateId, StateId)) -> Option<usize> {
        self.index.get(&p).copied()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn successors(&self, i: usize) -> &[(PairEvent, usize)] {
        &self.succ[i]
    }

    pub fn num_transitions(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn digraph(&self) -> Digraph<PairEvent> {
        Digraph::from_adjacency(self.succ.clone())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn pair(g: &Automaton, a: &str, b: &str) -> (StateId, StateId) {
        (g.state_id(a).unwrap(), g.state_id(b).unwrap())
    }

    #[test]
    fn deterministic_observable_model_is_diagonal() {
        let g = fixtures::load("F3b");
        let tp = TwinPlant::build(&g);
        assert!(tp.pairs().iter().all(|(a, b)| a == b));
        assert_eq!(tp.len(), 2);
    }

    #[test]
    fn f1_confuses_2_and_3() {
        let g = fixtures::load("F1");
        let tp = TwinPlant::build(&g);
        assert!(tp.index_of(pair(&g, "2", "3")).is_some());
        assert!(tp.index_of(pair(&g, "3", "2")).is_some());
        assert!(tp.index_of(pair(&g, "0", "2")).is_none());
    }

    #[test]
    fn f2a_reaches_nominal_fault_pair() {
        let g = fixtures::load("F2a");
        let tp = TwinPlant::build(&g);
        let f = g.alphabet().id("f").unwrap();
        let a = g.alphabet().id("a").unwrap();
        let start = tp.index_of(pair(&g, "n0", "n0")).unwrap();
        let mid = tp
            .successors(start)
            .iter()
            .find(|(ev, _)| *ev == PairEvent::Right(f))
            .unwrap()
            .1;
        assert_eq!(tp.pair(mid), pair(&g, "n0", "f1"));
        let end = tp
            .successors(mid)
            .iter()
            .find(|(ev, _)| *ev == PairEvent::Both(a))
            .unwrap()
            .1;
        assert_eq!(tp.pair(end), pair(&g, "n1", "f1"));
    }

    #[test]
    fn reachable_pairs_are_symmetric() {
        for (name, g) in fixtures::all() {
            let tp = TwinPlant::build(&g);
            for &(a, b) in tp.pairs() {
                assert!(tp.index_of((b, a)).is_some(), "{name}");
            }
            assert!(tp.len() <= g.num_states() * g.num_states());
        }
    }
}
