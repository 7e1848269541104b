//! Seeded random models for cross-validation.
//!
//! States are laid out along a random order. A spanning tree along that
//! order makes every state reachable, unobservable transitions only point
//! forward so no unobservable cycle can form, and states left without a
//! successor get an observable one. Models that still fail validation are
//! rejected and redrawn.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::assumptions;
use crate::automaton::{Automaton, AutomatonBuilder, EventId, StateId};

/// Shape of the generated models.
#[derive(Clone, Debug, PartialEq)]
pub struct RandomModel {
    pub states: usize,
    /// Total number of events, the fault event included.
    pub events: usize,
    /// Unobservable events, the fault event included.
    pub unobservable: usize,
    /// Expected number of extra transitions per state beyond the spanning
    /// tree and liveness patches.
    pub out_degree: f64,
    pub max_initial: usize,
    /// Split the states into a nominal and a faulty block joined by an
    /// unobservable fault event `f`.
    pub faults: bool,
    /// Draw a secret set and a few spec pairs.
    pub annotate: bool,
}

impl Default for RandomModel {
    fn default() -> Self {
        Self {
            states: 5,
            events: 3,
            unobservable: 1,
            out_degree: 1.0,
            max_initial: 2,
            faults: false,
            annotate: true,
        }
    }
}

impl RandomModel {
    /// Draws a small shape: at most 6 states, 4 events, 2 unobservable.
    pub fn sample_small(rng: &mut impl Rng) -> Self {
        let faults = rng.gen_bool(0.4);
        let states = rng.gen_range(if faults { 2 } else { 1 }..=6);
        let events = rng.gen_range(if faults { 2 } else { 1 }..=4);
        let min_uo = usize::from(faults);
        let unobservable = rng.gen_range(min_uo..=2.min(events - 1).max(min_uo));
        Self {
            states,
            events,
            unobservable,
            out_degree: rng.gen_range(0.3..2.0),
            max_initial: rng.gen_range(1..=2),
            faults,
            annotate: true,
        }
    }

    pub fn generate_seeded(&self, seed: u64) -> Automaton {
        self.generate(&mut ChaCha8Rng::seed_from_u64(seed))
    }

    /// # Panics
    /// If the shape admits no valid model: no observable event, more
    /// unobservable events than events, or a fault model with fewer than
    /// two states.
    pub fn generate(&self, rng: &mut impl Rng) -> Automaton {
        assert!(self.states >= 1 && self.unobservable < self.events);
        assert!(!self.faults || (self.states >= 2 && self.unobservable >= 1));
        loop {
            if let Some(g) = self.attempt(rng) {
                return g;
            }
        }
    }

    fn attempt(&self, rng: &mut impl Rng) -> Option<Automaton> {
        let n = self.states;
        let mut b = AutomatonBuilder::new();
        let ids: Vec<StateId> = (0..n).map(|i| b.add_state(i.to_string())).collect();
        let n_obs = self.events - self.unobservable;
        let mut obs = Vec::new();
        let mut uo = Vec::new();
        for i in 0..n_obs {
            let name = ((b'a' + i as u8) as char).to_string();
            obs.push(b.add_event(&name, true).ok()?);
        }
        let fault = if self.faults {
            Some(b.add_event("f", false).ok()?)
        } else {
            None
        };
        for i in 0..self.unobservable - usize::from(self.faults) {
            let name = ((b'u' + i as u8) as char).to_string();
            uo.push(b.add_event(&name, false).ok()?);
        }
        let plain: Vec<EventId> = obs.iter().chain(&uo).copied().collect();

        let mut order = ids.clone();
        order.shuffle(rng);
        // With faults the order is N block then F block.
        let nominal = if self.faults { rng.gen_range(1..n) } else { n };
        let pos = {
            let mut pos = vec![0; n];
            for (i, x) in order.iter().enumerate() {
                pos[x.index()] = i;
            }
            pos
        };
        let block = |x: StateId| pos[x.index()] >= nominal;
        let mut edges = Vec::new();
        let allowed = |x: StateId, e: EventId, y: StateId| {
            if Some(e) == fault {
                return !block(x) && block(y);
            }
            if block(x) != block(y) {
                return false;
            }
            obs.contains(&e) || pos[x.index()] < pos[y.index()]
        };

        for i in 1..n {
            let y = order[i];
            let x = order[rng.gen_range(0..i)];
            let e = if block(x) != block(y) {
                fault?
            } else {
                *plain.choose(rng)?
            };
            debug_assert!(allowed(x, e, y));
            edges.push((x, e, y));
        }
        let all_events: Vec<EventId> = plain.iter().copied().chain(fault).collect();
        let p = (self.out_degree / (n * all_events.len()) as f64).min(1.0);
        for &x in &ids {
            for &e in &all_events {
                for &y in &ids {
                    if rng.gen_bool(p) && allowed(x, e, y) {
                        edges.push((x, e, y));
                    }
                }
            }
        }
        for &x in &ids {
            if !edges.iter().any(|&(s, _, _)| s == x) {
                let same: Vec<StateId> = ids
                    .iter()
                    .copied()
                    .filter(|&y| block(y) == block(x))
                    .collect();
                edges.push((x, *obs.choose(rng)?, *same.choose(rng)?));
            }
        }
        edges.sort();
        edges.dedup();
        for &(x, e, y) in &edges {
            b.add_transition(x, e, y);
        }

        b.add_initial(order[0]);
        let extra = rng.gen_range(0..self.max_initial.max(1));
        for _ in 0..extra {
            b.add_initial(order[rng.gen_range(0..nominal)]);
        }
        if let Some(f) = fault {
            b.fault_events([f]);
            b.fault_states(order[nominal..].iter().copied());
        }
        if self.annotate {
            b.secret(ids.iter().copied().filter(|_| rng.gen_bool(0.35)));
            for _ in 0..rng.gen_range(0..=2) {
                let x = *ids.choose(rng)?;
                let y = *ids.choose(rng)?;
                if x != y {
                    b.spec_pair(x, y);
                }
            }
        }
        let (g, _) = b.build().ok()?;
        let graph = crate::graph::Digraph::from_adjacency(
            g.states()
                .map(|x| g.out_edges(x).map(|(e, y)| (e, y.index())).collect())
                .collect(),
        );
        let reachable = graph
            .bfs(g.initial().iter().map(|x| x.index()))
            .reached_nodes()
            .count()
            == n;
        let ok = reachable
            && assumptions::check_liveness(&g).holds()
            && assumptions::check_no_unobservable_cycle(&g).holds();
        ok.then_some(g)
    }
}

/// The `count` small models used for cross-validation, drawn from `seed`.
pub fn corpus(count: usize, seed: u64) -> Vec<Automaton> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| RandomModel::sample_small(&mut rng).generate(&mut rng))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_valid_and_reproducible() {
        let a = corpus(60, 7);
        assert_eq!(a, corpus(60, 7));
        for g in &a {
            assert!(g.num_states() <= 6 && g.alphabet().len() <= 4);
            assert!(g.alphabet().unobservable().count() <= 2);
            assert!(assumptions::require(g, false).is_ok());
        }
        assert!(a.iter().any(|g| g.fault_states().is_some()));
        assert!(a.iter().any(|g| g.alphabet().unobservable().count() == 2));
    }

    #[test]
    fn large_models() {
        let shape = RandomModel {
            states: 50,
            events: 6,
            unobservable: 2,
            out_degree: 1.5,
            faults: true,
            ..RandomModel::default()
        };
        let g = shape.generate_seeded(3);
        assert_eq!(g.num_states(), 50);
        assert!(g.fault_events().is_some());
    }
}
