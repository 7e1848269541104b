//! Current, initial and delayed state estimation on top of cached observers.

use std::sync::{Arc, OnceLock};

use crate::assumptions;
use crate::automaton::{Automaton, EventId, StateSet};
use crate::construct::{self, Paired};
use crate::error::{Error, Result};
use crate::observer::Observer;
use crate::twin::TwinPlant;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EstimateKind {
    Current,
    Initial,
    /// Smoothed estimate; `split` is the length of the observation prefix
    /// the estimate refers to.
    Delayed {
        split: usize,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StateEstimate {
    pub states: StateSet,
    pub kind: EstimateKind,
}

/// The reversed model and its observer.
#[derive(Debug)]
pub struct Reversed {
    pub automaton: Automaton,
    pub observer: Observer,
}

/// The augmented model and its observer.
#[derive(Debug)]
pub struct Augmented {
    pub paired: Paired,
    pub observer: Observer,
}

impl Augmented {
    /// I_0 of an observer state: the initial states its members started from.
    pub fn initial_projection(&self, q: usize) -> StateSet {
        self.paired.first(self.observer.state(q))
    }
}

/// Estimation front end for one model. Observers of the model, its reversal
/// and its augmentation are built on first use and then reused; the cache is
/// invisible in results.
#[derive(Debug)]
pub struct Estimator {
    model: Arc<Automaton>,
    forward: OnceLock<Observer>,
    reversed: OnceLock<Reversed>,
    augmented: OnceLock<Augmented>,
    twin: OnceLock<TwinPlant>,
    a2_waived: bool,
}

impl Estimator {
    /// Checks liveness and the absence of unobservable cycles first.
    pub fn new(model: impl Into<Arc<Automaton>>) -> Result<Self> {
        let model = model.into();
        assumptions::require(&model, false)?;
        Ok(Self::unchecked(model))
    }

    /// Skips the assumption checks.
    pub fn unchecked(model: impl Into<Arc<Automaton>>) -> Self {
        Self {
            model: model.into(),
            forward: OnceLock::new(),
            reversed: OnceLock::new(),
            augmented: OnceLock::new(),
            twin: OnceLock::new(),
            a2_waived: false,
        }
    }

    /// Marks the unobservable-cycle assumption as waived: verification then
    /// only requires liveness, and the twin-plant diagnosability check
    /// switches to its unobservable-cycle-safe criterion.
    pub fn waive_a2(mut self) -> Self {
        self.a2_waived = true;
        self
    }

    pub fn a2_waived(&self) -> bool {
        self.a2_waived
    }

    /// Re-checks the model assumptions (A2 only when not waived).
    pub fn require_assumptions(&self) -> Result<()> {
        assumptions::require(&self.model, self.a2_waived)
    }

    pub fn model(&self) -> &Automaton {
        &self.model
    }

    pub fn shared_model(&self) -> Arc<Automaton> {
        Arc::clone(&self.model)
    }

    pub fn observer(&self) -> &Observer {
        self.forward.get_or_init(|| Observer::build(&self.model))
    }

    pub fn reversed(&self) -> &Reversed {
        self.reversed.get_or_init(|| {
            let automaton = construct::reverse(&self.model);
            let observer = Observer::build(&automaton);
            Reversed {
                automaton,
                observer,
            }
        })
    }

    pub fn twin(&self) -> &TwinPlant {
        self.twin.get_or_init(|| TwinPlant::build(&self.model))
    }

    pub fn augmented(&self) -> &Augmented {
        self.augmented.get_or_init(|| {
            let paired = construct::augment(&self.model);
            let observer = Observer::build(&paired.automaton);
            Augmented { paired, observer }
        })
    }

    fn check_observable(&self, trace: &[EventId]) -> Result<()> {
        let a = self.model.alphabet();
        for &e in trace {
            if !a.contains(e) {
                return Err(Error::UnknownEvent(format!("#{}", e.index())));
            }
            if !a.is_observable(e) {
                return Err(Error::NotObservable(a.name(e).to_string()));
            }
        }
        Ok(())
    }

    fn not_generable(&self, trace: &[EventId], len: usize) -> Error {
        Error::NotGenerable {
            prefix: self.model.alphabet().format(&trace[..len]),
            len,
        }
    }

    /// Index of the forward-observer state reached by `alpha`.
    pub fn locate(&self, alpha: &[EventId]) -> Result<usize> {
        self.check_observable(alpha)?;
        let obs = self.observer();
        obs.walk(obs.initial(), alpha)
            .map_err(|k| self.not_generable(alpha, k))
    }

    /// X̂(α), read off the observer.
    pub fn current(&self, alpha: &[EventId]) -> Result<StateEstimate> {
        let q = self.locate(alpha)?;
        Ok(StateEstimate {
            states: self.observer().state(q).clone(),
            kind: EstimateKind::Current,
        })
    }

    /// X̂_0(α) from the observer of the augmented model.
    pub fn initial_aug(&self, alpha: &[EventId]) -> Result<StateEstimate> {
        self.check_observable(alpha)?;
        let aug = self.augmented();
        let q = aug
            .observer
            .walk(aug.observer.initial(), alpha)
            .map_err(|k| self.not_generable(alpha, k))?;
        Ok(StateEstimate {
            states: aug.initial_projection(q),
            kind: EstimateKind::Initial,
        })
    }

    /// X̂_0(α) as X̂_{G_R}(α_R) ∩ X_0.
    pub fn initial_rev(&self, alpha: &[EventId]) -> Result<StateEstimate> {
        self.locate(alpha)?;
        let states = self
            .reversed_estimate(alpha)
            .intersection(self.model.initial())
            .copied()
            .collect();
        Ok(StateEstimate {
            states,
            kind: EstimateKind::Initial,
        })
    }

    /// X̂_{G_R}(β_R): the states from which β can be generated. Empty when
    /// β is not generable anywhere.
    pub fn reversed_estimate(&self, beta: &[EventId]) -> StateSet {
        let rev = self.reversed();
        let beta_r: Vec<EventId> = beta.iter().rev().copied().collect();
        match rev.observer.walk(rev.observer.initial(), &beta_r) {
            Ok(q) => rev.observer.state(q).clone(),
            Err(_) => StateSet::new(),
        }
    }

    /// X̂(α|αβ) = X̂(α) ∩ X̂_{G_R}(β_R).
    pub fn delayed(&self, alpha: &[EventId], beta: &[EventId]) -> Result<StateEstimate> {
        let whole: Vec<EventId> = alpha.iter().chain(beta).copied().collect();
        self.locate(&whole)?;
        let current = self.current(alpha)?.states;
        let states = current
            .intersection(&self.reversed_estimate(beta))
            .copied()
            .collect();
        Ok(StateEstimate {
            states,
            kind: EstimateKind::Delayed { split: alpha.len() },
        })
    }

    pub fn session(&self) -> EstimatorSession<'_> {
        EstimatorSession {
            observer: self.observer(),
            model: &self.model,
            current: 0,
            seen: Vec::new(),
        }
    }
}

/// Online current-state estimator: one observer lookup per event.
#[derive(Clone, Debug)]
pub struct EstimatorSession<'a> {
    observer: &'a Observer,
    model: &'a Automaton,
    current: usize,
    seen: Vec<EventId>,
}

impl EstimatorSession<'_> {
    pub fn estimate(&self) -> &StateSet {
        self.observer.state(self.current)
    }

    /// Number of events consumed so far.
    pub fn steps(&self) -> usize {
        self.seen.len()
    }

    /// Consumes one observed event. On error the session is unchanged.
    pub fn step(&mut self, e: EventId) -> Result<&StateSet> {
        let a = self.model.alphabet();
        if !a.contains(e) {
            return Err(Error::UnknownEvent(format!("#{}", e.index())));
        }
        if !a.is_observable(e) {
            return Err(Error::NotObservable(a.name(e).to_string()));
        }
        match self.observer.successor(self.current, e) {
            Some(next) => {
                self.current = next;
                self.seen.push(e);
                Ok(self.estimate())
            }
            None => Err(Error::NotGenerable {
                prefix: a.format(&self.seen),
                len: self.seen.len(),
            }),
        }
    }
}
