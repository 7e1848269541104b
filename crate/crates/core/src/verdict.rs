//! Verdicts and the evidence attached to negative ones.

use std::fmt::Write as _;

use crate::automaton::{Automaton, EventId, StateId, StateSet};
use crate::estimate::EstimateKind;
use crate::twin::PairEvent;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Violated(Witness),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Holds => None,
            Verdict::Violated(w) => Some(w),
        }
    }

    /// `HOLDS` or `VIOLATED`.
    pub fn label(&self) -> &'static str {
        if self.holds() {
            "HOLDS"
        } else {
            "VIOLATED"
        }
    }
}

/// Coarse classification of witnesses.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Cycle,
    Observation,
    StatePair,
    Estimate,
    State,
}

/// Which observer a cycle witness lives in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ObserverVariant {
    /// Obs(G); the recorded sets are current-state estimates.
    Forward,
    /// Obs(G_aug); the recorded sets are initial-state projections I_0.
    Augmented,
}

/// A cycle of an observer, reached by `prefix` and closed by `cycle`.
/// `estimates[i]` is the set after `prefix` and the first `i` cycle events,
/// so the first and last entries coincide.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObserverCycle {
    pub variant: ObserverVariant,
    pub prefix: Vec<EventId>,
    pub cycle: Vec<EventId>,
    pub estimates: Vec<StateSet>,
}

/// A cycle of `G × Obs~(G)`; `prefix` and `cycle` are strings of G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DiagnoserCycle {
    pub prefix: Vec<EventId>,
    pub cycle: Vec<EventId>,
    pub nodes: Vec<(StateId, StateSet)>,
}

/// A twin-plant path leaving a cycle; its observation is a prefix of the
/// repeated cycle observation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinBranch {
    pub path: Vec<PairEvent>,
    pub nodes: Vec<(StateId, StateId)>,
}

/// A twin-plant cycle: `nodes[0]` is reached from an initial pair by
/// `prefix`, and `cycle` leads through `nodes` back to `nodes[0]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinCycle {
    pub prefix: Vec<PairEvent>,
    pub cycle: Vec<PairEvent>,
    pub nodes: Vec<(StateId, StateId)>,
    pub branch: Option<TwinBranch>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ObservationWitness {
    pub kind: EstimateKind,
    pub trace: Vec<EventId>,
    pub estimate: StateSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairWitness {
    pub pair: (StateId, StateId),
    pub trace: Vec<EventId>,
    pub estimate: StateSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwinPairWitness {
    pub pair: (StateId, StateId),
    pub path: Vec<PairEvent>,
}

/// A delayed estimate: `current` = X̂(α), `reversed` = X̂_{G_R}(β_R).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmoothingWitness {
    pub alpha: Vec<EventId>,
    pub beta: Vec<EventId>,
    pub current: StateSet,
    pub reversed: StateSet,
}

impl SmoothingWitness {
    pub fn delayed(&self) -> StateSet {
        self.current.intersection(&self.reversed).copied().collect()
    }
}

/// Observation lasso `stem · loop^k · tail`: the estimate after `stem`
/// equals the estimate after `stem · loop`, so every pumped variant of the
/// tail ends in the same estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LassoWitness {
    pub kind: EstimateKind,
    pub stem: Vec<EventId>,
    pub cycle: Vec<EventId>,
    pub tail: Vec<EventId>,
}

/// A run of G reaching `state` by `stem` (through a fault) and returning to
/// it by `cycle` with an unchanged current-state estimate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunLassoWitness {
    pub stem: Vec<EventId>,
    pub cycle: Vec<EventId>,
    pub state: StateId,
}

/// A finite string of G.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunWitness {
    pub string: Vec<EventId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Witness {
    DeadState(StateId),
    ModelCycle {
        states: Vec<StateId>,
        events: Vec<EventId>,
    },
    ObserverCycle(ObserverCycle),
    DiagnoserCycle(DiagnoserCycle),
    TwinCycle(TwinCycle),
    Observation(ObservationWitness),
    StatePair(PairWitness),
    TwinPair(TwinPairWitness),
    Smoothing(SmoothingWitness),
    Lasso(LassoWitness),
    RunLasso(RunLassoWitness),
    Run(RunWitness),
}

impl Witness {
    pub fn kind(&self) -> WitnessKind {
        match self {
            Witness::DeadState(_) => WitnessKind::State,
            Witness::ModelCycle { .. }
            | Witness::ObserverCycle(_)
            | Witness::DiagnoserCycle(_)
            | Witness::TwinCycle(_)
            | Witness::Lasso(_)
            | Witness::RunLasso(_) => WitnessKind::Cycle,
            Witness::Observation(_) | Witness::Run(_) => WitnessKind::Observation,
            Witness::StatePair(_) | Witness::TwinPair(_) => WitnessKind::StatePair,
            Witness::Smoothing(_) => WitnessKind::Estimate,
        }
    }

    /// Multi-line human-readable rendering using the model's names.
    pub fn render(&self, g: &Automaton) -> String {
        let a = g.alphabet();
        let set = |s: &StateSet| g.format_set(s);
        let pair = |p: &(StateId, StateId)| format!("({},{})", g.name(p.0), g.name(p.1));
        let pair_events = |evs: &[PairEvent]| -> String {
            if evs.is_empty() {
                "ε".into()
            } else {
                evs.iter()
                    .map(|e| e.render(g))
                    .collect::<Vec<_>>()
                    .join(" ")
            }
        };
        let mut out = String::new();
        match self {
            Witness::DeadState(x) => {
                let _ = writeln!(out, "witness: dead state {}", g.name(*x));
            }
            Witness::ModelCycle { states, events } => {
                let _ = writeln!(out, "witness: cycle in the model");
                let _ = writeln!(
                    out,
                    "  {}",
                    chain(
                        states.iter().map(|&x| g.name(x).to_string()),
                        events.iter().map(|&e| a.name(e).to_string())
                    )
                );
            }
            Witness::ObserverCycle(c) => {
                let what = match c.variant {
                    ObserverVariant::Forward => "observer cycle (current-state estimates)",
                    ObserverVariant::Augmented => {
                        "augmented-observer cycle (initial-state estimates)"
                    }
                };
                let _ = writeln!(out, "witness: {what}");
                let _ = writeln!(out, "  prefix: {}", a.format(&c.prefix));
                let _ = writeln!(out, "  cycle: {}", a.format(&c.cycle));
                let _ = writeln!(
                    out,
                    "  {}",
                    chain(
                        c.estimates.iter().map(set),
                        c.cycle.iter().map(|&e| a.name(e).to_string())
                    )
                );
            }
            Witness::DiagnoserCycle(c) => {
                let _ = writeln!(out, "witness: indeterminate cycle in G x Obs~(G)");
                let _ = writeln!(out, "  prefix: {}", a.format(&c.prefix));
                let _ = writeln!(out, "  cycle: {}", a.format(&c.cycle));
                let _ = writeln!(
                    out,
                    "  {}",
                    chain(
                        c.nodes
                            .iter()
                            .map(|(x, q)| format!("({},{})", g.name(*x), set(q))),
                        c.cycle.iter().map(|&e| a.name(e).to_string())
                    )
                );
            }
            Witness::TwinCycle(c) => {
                let _ = writeln!(out, "witness: twin-plant cycle");
                let _ = writeln!(out, "  prefix: {}", pair_events(&c.prefix));
                let _ = writeln!(out, "  cycle: {}", pair_events(&c.cycle));
                let _ = writeln!(
                    out,
                    "  {}",
                    chain(
                        c.nodes.iter().map(pair),
                        c.cycle.iter().map(|e| e.render(g))
                    )
                );
                if let Some(b) = &c.branch {
                    let _ = writeln!(out, "  branch: {}", pair_events(&b.path));
                    let _ = writeln!(
                        out,
                        "  {}",
                        chain(b.nodes.iter().map(pair), b.path.iter().map(|e| e.render(g)))
                    );
                }
            }
            Witness::Observation(w) => {
                let what = match w.kind {
                    EstimateKind::Current => "current-state estimate",
                    EstimateKind::Initial => "initial-state estimate",
                    EstimateKind::Delayed { .. } => "delayed-state estimate",
                };
                let _ = writeln!(out, "witness: observation {}", a.format(&w.trace));
                let _ = writeln!(out, "  {what}: {}", set(&w.estimate));
            }
            Witness::StatePair(w) => {
                let _ = writeln!(out, "witness: state pair {}", pair(&w.pair));
                let _ = writeln!(out, "  observation: {}", a.format(&w.trace));
                let _ = writeln!(out, "  estimate: {}", set(&w.estimate));
            }
            Witness::TwinPair(w) => {
                let _ = writeln!(out, "witness: state pair {}", pair(&w.pair));
                let _ = writeln!(out, "  twin-plant path: {}", pair_events(&w.path));
            }
            Witness::Smoothing(w) => {
                let _ = writeln!(out, "witness: delayed estimate {}", set(&w.delayed()));
                let _ = writeln!(out, "  alpha: {}", a.format(&w.alpha));
                let _ = writeln!(out, "  beta: {}", a.format(&w.beta));
                let _ = writeln!(out, "  current estimate after alpha: {}", set(&w.current));
                let _ = writeln!(out, "  reversed estimate of beta: {}", set(&w.reversed));
            }
            Witness::Lasso(w) => {
                let _ = writeln!(out, "witness: observation lasso");
                let _ = writeln!(out, "  stem: {}", a.format(&w.stem));
                let _ = writeln!(out, "  loop: {}", a.format(&w.cycle));
                let _ = writeln!(out, "  tail: {}", a.format(&w.tail));
            }
            Witness::RunLasso(w) => {
                let _ = writeln!(out, "witness: run lasso at state {}", g.name(w.state));
                let _ = writeln!(out, "  stem: {}", a.format(&w.stem));
                let _ = writeln!(out, "  loop: {}", a.format(&w.cycle));
            }
            Witness::Run(w) => {
                let _ = writeln!(out, "witness: string {}", a.format(&w.string));
            }
        }
        out
    }
}

fn chain(nodes: impl Iterator<Item = String>, labels: impl Iterator<Item = String>) -> String {
    let mut out = String::new();
    let mut labels = labels;
    for (i, n) in nodes.enumerate() {
        if i > 0 {
            let l = labels.next().unwrap_or_default();
            let _ = write!(out, " -{l}-> ");
        }
        out.push_str(&n);
    }
    out
}
