//! Brute-force reference semantics.
//!
//! Everything here works on explicit strings of the model rather than on
//! observers: estimates are set comprehensions over enumerated strings, and
//! the falsifiers search for bounded counterexamples to each property's
//! definition. Results are exact for the strings enumerated; the absence of
//! a counterexample within a bound proves nothing.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::automaton::{project, Automaton, EventId, StateId, StateSet};
use crate::error::{Error, Precondition, Result};
use crate::estimate::EstimateKind;
use crate::verdict::{
    LassoWitness, ObservationWitness, PairWitness, RunLassoWitness, RunWitness, SmoothingWitness,
    Witness,
};
use crate::verify::{Property, PropertyQuery};

pub mod random;

/// Run pairs (initial state, current state).
type Runs = BTreeSet<(StateId, StateId)>;
type Lasso = (Vec<EventId>, Vec<EventId>);
type Visit<'v> = dyn FnMut(&[EventId], &[EventId], &Runs) + 'v;

/// Largest bound accepted by [`enumerate_language`] and [`falsify`].
pub const MAX_BOUND: usize = 12;
/// Safety valve on the number of strings any single enumeration visits.
pub const STRING_LIMIT: usize = 2_000_000;

/// The strings of length ≤ `bound` a model generates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundedLanguage {
    strings: BTreeSet<Vec<EventId>>,
    bound: usize,
}

impl BoundedLanguage {
    pub fn bound(&self) -> usize {
        self.bound
    }

    pub fn strings(&self) -> &BTreeSet<Vec<EventId>> {
        &self.strings
    }

    pub fn contains(&self, s: &[EventId]) -> bool {
        self.strings.contains(s)
    }

    pub fn len(&self) -> usize {
        self.strings.len()
    }

    pub fn is_empty(&self) -> bool {
        self.strings.is_empty()
    }

    /// Natural projections of the member strings.
    pub fn observations(&self, g: &Automaton) -> BTreeSet<Vec<EventId>> {
        self.strings
            .iter()
            .map(|s| {
                project(s, g.alphabet())
                    .expect("member strings use the alphabet")
                    .into_inner()
            })
            .collect()
    }
}

/// Breadth-first unfolding of δ from the initial states.
pub fn enumerate_language(g: &Automaton, bound: usize) -> Result<BoundedLanguage> {
    if bound > MAX_BOUND {
        return Err(Error::BoundExceeded {
            bound,
            limit: MAX_BOUND,
        });
    }
    let mut strings = BTreeSet::from([Vec::new()]);
    let mut frontier = vec![(Vec::new(), g.initial().clone())];
    for _ in 0..bound {
        let mut next = Vec::new();
        for (s, set) in &frontier {
            for e in g.alphabet().events() {
                let to = g.step(set, e);
                if !to.is_empty() {
                    let mut s2 = s.clone();
                    s2.push(e);
                    strings.insert(s2.clone());
                    next.push((s2, to));
                }
            }
        }
        if strings.len() > STRING_LIMIT {
            return Err(Error::EnumerationLimit(STRING_LIMIT));
        }
        frontier = next;
    }
    Ok(BoundedLanguage { strings, bound })
}

/// Length cap that covers every run with at most `depth` observable events
/// when there is no unobservable cycle: each of the `depth + 1` unobservable
/// stretches visits distinct states.
pub fn length_cap(g: &Automaton, depth: usize) -> usize {
    depth + (depth + 1) * g.num_states().saturating_sub(1)
}

/// Visits every string `s` generable from some state of `start` with
/// `|P(s)| ≤ depth` and `|s| ≤ cap`, in depth-first order. The callback sees
/// `s`, `P(s)` and the run pairs `{(x0, x) : x0 ∈ start, x ∈ δ(x0, s)}`.
/// `keep_obs` prunes observation prefixes that cannot matter.
fn for_each_string(
    g: &Automaton,
    start: &StateSet,
    depth: usize,
    cap: usize,
    keep_obs: &dyn Fn(&[EventId]) -> bool,
    visit: &mut Visit<'_>,
) -> Result<()> {
    struct Walk<'a> {
        g: &'a Automaton,
        depth: usize,
        cap: usize,
        keep_obs: &'a dyn Fn(&[EventId]) -> bool,
        count: usize,
        s: Vec<EventId>,
        obs: Vec<EventId>,
    }
    fn go(
        w: &mut Walk<'_>,
        pairs: &BTreeSet<(StateId, StateId)>,
        visit: &mut Visit<'_>,
    ) -> Result<()> {
        w.count += 1;
        if w.count > STRING_LIMIT {
            return Err(Error::EnumerationLimit(STRING_LIMIT));
        }
        visit(&w.s, &w.obs, pairs);
        let g = w.g;
        for e in g.alphabet().events() {
            let observable = g.alphabet().is_observable(e);
            if observable && w.obs.len() == w.depth {
                continue;
            }
            let next: BTreeSet<_> = pairs
                .iter()
                .flat_map(|&(x0, x)| {
                    g.successors(x, e)
                        .into_iter()
                        .flatten()
                        .map(move |&y| (x0, y))
                })
                .collect();
            if next.is_empty() {
                continue;
            }
            if w.s.len() == w.cap {
                return Err(Error::Truncated(w.cap));
            }
            if observable {
                w.obs.push(e);
                if !(w.keep_obs)(&w.obs) {
                    w.obs.pop();
                    continue;
                }
            }
            w.s.push(e);
            let r = go(w, &next, visit);
            w.s.pop();
            if observable {
                w.obs.pop();
            }
            r?;
        }
        Ok(())
    }
    let mut w = Walk {
        g,
        depth,
        cap,
        keep_obs,
        count: 0,
        s: Vec::new(),
        obs: Vec::new(),
    };
    let pairs = start.iter().map(|&x| (x, x)).collect();
    go(&mut w, &pairs, visit)
}

fn is_prefix_of<'a>(target: &'a [EventId]) -> impl Fn(&[EventId]) -> bool + 'a {
    move |p: &[EventId]| target.starts_with(p)
}

/// Current-state estimate by definition: every state reached by a string
/// whose projection is `alpha`, over strings of length ≤ `bound`.
pub fn current_estimate(g: &Automaton, alpha: &[EventId], bound: usize) -> Result<StateSet> {
    let mut out = StateSet::new();
    let keep = is_prefix_of(alpha);
    for_each_string(
        g,
        g.initial(),
        alpha.len(),
        bound,
        &keep,
        &mut |_, obs, pairs| {
            if obs == alpha {
                out.extend(pairs.iter().map(|p| p.1));
            }
        },
    )?;
    Ok(out)
}

/// Initial-state estimate by definition: every initial state from which
/// some string with projection `alpha` is generable.
pub fn initial_estimate(g: &Automaton, alpha: &[EventId], bound: usize) -> Result<StateSet> {
    let mut out = StateSet::new();
    let keep = is_prefix_of(alpha);
    for_each_string(
        g,
        g.initial(),
        alpha.len(),
        bound,
        &keep,
        &mut |_, obs, pairs| {
            if obs == alpha {
                out.extend(pairs.iter().map(|p| p.0));
            }
        },
    )?;
    Ok(out)
}

/// Observations of length ≤ `depth` generable from `x`.
fn futures(g: &Automaton, x: StateId, depth: usize, cap: usize) -> Result<BTreeSet<Vec<EventId>>> {
    let mut out = BTreeSet::new();
    for_each_string(
        g,
        &StateSet::from([x]),
        depth,
        cap,
        &|_| true,
        &mut |_, obs, _| {
            out.insert(obs.to_vec());
        },
    )?;
    Ok(out)
}

/// Delayed estimate by definition: states of the current estimate of
/// `alpha` from which a string with projection `beta` continues.
pub fn delayed_estimate(
    g: &Automaton,
    alpha: &[EventId],
    beta: &[EventId],
    bound: usize,
) -> Result<StateSet> {
    let now = current_estimate(g, alpha, bound)?;
    let mut out = StateSet::new();
    for &x in &now {
        let mut found = false;
        let keep = is_prefix_of(beta);
        for_each_string(
            g,
            &StateSet::from([x]),
            beta.len(),
            bound,
            &keep,
            &mut |_, obs, _| {
                found |= obs == beta;
            },
        )?;
        if found {
            out.insert(x);
        }
    }
    Ok(out)
}

/// Indicator states by their definition, bounded by the pigeonhole
/// principle: x ∈ X_N is an indicator iff no fault-free string of length
/// |X| leaves x.
pub fn indicator_states(g: &Automaton) -> Result<StateSet> {
    let (_, xn) = crate::fault::fault_annotations(g)?;
    let n = g.num_states();
    Ok(xn
        .into_iter()
        .filter(|&x| {
            let mut cur = StateSet::from([x]);
            for _ in 0..n {
                cur = cur
                    .iter()
                    .flat_map(|&y| g.out_edges(y))
                    .filter(|&(e, _)| !g.is_fault_event(e))
                    .map(|(_, z)| z)
                    .collect();
            }
            cur.is_empty()
        })
        .collect())
}

/// Boundary states by their definition.
pub fn boundary_states(g: &Automaton) -> Result<StateSet> {
    let (_, xn) = crate::fault::fault_annotations(g)?;
    Ok(xn
        .into_iter()
        .filter(|&x| g.out_edges(x).any(|(e, _)| g.is_fault_event(e)))
        .collect())
}

/// All observations of length ≤ `depth` with their run pairs
/// A(α) = {(x0, x) : ∃s, P(s) = α, x ∈ δ(x0, s)}, plus per-state futures.
#[derive(Clone, Debug)]
pub struct OracleTable {
    depth: usize,
    runs: BTreeMap<Vec<EventId>, BTreeSet<(StateId, StateId)>>,
    futures: Vec<BTreeSet<Vec<EventId>>>,
}

impl OracleTable {
    pub fn build(g: &Automaton, depth: usize) -> Result<Self> {
        let cap = length_cap(g, depth);
        let mut runs: BTreeMap<Vec<EventId>, BTreeSet<(StateId, StateId)>> = BTreeMap::new();
        for_each_string(
            g,
            g.initial(),
            depth,
            cap,
            &|_| true,
            &mut |_, obs, pairs| {
                runs.entry(obs.to_vec())
                    .or_default()
                    .extend(pairs.iter().copied());
            },
        )?;
        let futures = g
            .states()
            .map(|x| futures(g, x, depth, cap))
            .collect::<Result<_>>()?;
        Ok(Self {
            depth,
            runs,
            futures,
        })
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// P(L(G)) truncated at the table depth, ordered by length then
    /// lexicographically.
    pub fn observations(&self) -> Vec<&Vec<EventId>> {
        let mut v: Vec<_> = self.runs.keys().collect();
        v.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        v
    }

    pub fn contains(&self, alpha: &[EventId]) -> bool {
        self.runs.contains_key(alpha)
    }

    pub fn runs(&self, alpha: &[EventId]) -> Option<&BTreeSet<(StateId, StateId)>> {
        self.runs.get(alpha)
    }

    pub fn current(&self, alpha: &[EventId]) -> Option<StateSet> {
        self.runs
            .get(alpha)
            .map(|r| r.iter().map(|p| p.1).collect())
    }

    pub fn initial(&self, alpha: &[EventId]) -> Option<StateSet> {
        self.runs
            .get(alpha)
            .map(|r| r.iter().map(|p| p.0).collect())
    }

    /// States from which `beta` can be observed (|β| ≤ depth).
    pub fn continuing(&self, beta: &[EventId]) -> StateSet {
        (0..self.futures.len())
            .filter(|&x| self.futures[x].contains(beta))
            .map(StateId)
            .collect()
    }

    /// Delayed estimate for a generable αβ with |αβ| ≤ depth.
    pub fn delayed(&self, alpha: &[EventId], beta: &[EventId]) -> Option<StateSet> {
        let whole: Vec<EventId> = alpha.iter().chain(beta).copied().collect();
        if !self.contains(&whole) {
            return None;
        }
        let now = self.current(alpha)?;
        Some(
            now.into_iter()
                .filter(|x| self.futures[x.index()].contains(beta))
                .collect(),
        )
    }

    /// Every split (α, β) of every observation, ordered by total length,
    /// then α, then β.
    pub fn splits(&self) -> Vec<(&[EventId], &[EventId])> {
        self.observations()
            .into_iter()
            .flat_map(|w| (0..=w.len()).map(move |k| w.split_at(k)))
            .collect()
    }
}

/// Searches for a bounded counterexample to `query.property` among
/// observations of length ≤ `bound`.
pub fn falsify(g: &Automaton, query: &PropertyQuery, bound: usize) -> Result<Option<Witness>> {
    if bound > MAX_BOUND {
        return Err(Error::BoundExceeded {
            bound,
            limit: MAX_BOUND,
        });
    }
    let need = |what: &'static str| Error::Precondition(Precondition::MissingAnnotation(what));
    match query.property {
        Property::OpacityCurrent | Property::OpacityInitial | Property::OpacityInfinite => {
            g.secret().ok_or_else(|| need("secret"))?;
        }
        Property::Distinguishability => {
            g.spec_pairs().ok_or_else(|| need("spec-pair"))?;
        }
        Property::Diagnosability => crate::verify::require_unobservable_faults(g)?,
        Property::Prognosability => {
            crate::fault::fault_annotations(g)?;
        }
        _ => {}
    }
    let table = OracleTable::build(g, bound)?;
    Ok(match query.property {
        Property::OpacityCurrent => {
            let xs = g.secret().expect("checked");
            table.observations().into_iter().find_map(|a| {
                let e = table.current(a)?;
                e.is_subset(xs).then(|| {
                    Witness::Observation(ObservationWitness {
                        kind: EstimateKind::Current,
                        trace: a.clone(),
                        estimate: e,
                    })
                })
            })
        }
        Property::OpacityInitial => {
            let xs = g.secret().expect("checked");
            table.observations().into_iter().find_map(|a| {
                let e = table.initial(a)?;
                e.is_subset(xs).then(|| {
                    Witness::Observation(ObservationWitness {
                        kind: EstimateKind::Initial,
                        trace: a.clone(),
                        estimate: e,
                    })
                })
            })
        }
        Property::OpacityInfinite => {
            let xs = g.secret().expect("checked");
            smoothing(&table, |_, _, d| !d.is_empty() && d.is_subset(xs))
        }
        Property::DetectabilityDelayed { k1, k2 } => smoothing(&table, |a, b, d| {
            a.len() >= k1 && b.len() >= k2 && d.len() > 1
        }),
        Property::Distinguishability => {
            let t = g.spec_pairs().expect("checked");
            table.observations().into_iter().find_map(|a| {
                let e = table.current(a)?;
                let &pair = t.iter().find(|(x, y)| e.contains(x) && e.contains(y))?;
                Some(Witness::StatePair(PairWitness {
                    pair,
                    trace: a.clone(),
                    estimate: e,
                }))
            })
        }
        Property::DetectabilityCurrent => lasso(&table, EstimateKind::Current),
        Property::DetectabilityInitial => lasso(&table, EstimateKind::Initial),
        Property::Prognosability => prognosis_run(g, &table)?,
        Property::Diagnosability => run_lasso(g, &table)?,
    })
}

fn smoothing(
    table: &OracleTable,
    violates: impl Fn(&[EventId], &[EventId], &StateSet) -> bool,
) -> Option<Witness> {
    table.splits().into_iter().find_map(|(a, b)| {
        let d = table.delayed(a, b)?;
        violates(a, b, &d).then(|| {
            Witness::Smoothing(SmoothingWitness {
                alpha: a.to_vec(),
                beta: b.to_vec(),
                current: table.current(a).expect("generable"),
                reversed: table.continuing(b),
            })
        })
    })
}

/// Shortest lasso stem·loop with an unchanged estimate (or run-pair set for
/// initial estimates) and an ambiguous estimate on the loop.
fn lasso(table: &OracleTable, kind: EstimateKind) -> Option<Witness> {
    let mut found: Option<(usize, LassoWitness)> = None;
    for w in table.observations() {
        for k in 0..w.len() {
            let (stem, cycle) = w.split_at(k);
            let tail = match kind {
                EstimateKind::Initial => {
                    if table.runs(stem) != table.runs(w) || table.initial(w)?.len() < 2 {
                        continue;
                    }
                    Some(&cycle[..0])
                }
                _ => {
                    if table.current(stem) != table.current(w) {
                        continue;
                    }
                    (0..cycle.len()).map(|i| &cycle[..i]).find(|t| {
                        let sv: Vec<EventId> = stem.iter().chain(t.iter()).copied().collect();
                        table.current(&sv).is_some_and(|e| e.len() > 1)
                    })
                }
            };
            let Some(tail) = tail else { continue };
            let cand = LassoWitness {
                kind,
                stem: stem.to_vec(),
                cycle: cycle.to_vec(),
                tail: tail.to_vec(),
            };
            if found.as_ref().is_none_or(|(len, _)| w.len() < *len) {
                found = Some((w.len(), cand));
            }
        }
    }
    found.map(|(_, l)| Witness::Lasso(l))
}

/// Shortest string reaching a boundary state such that no prefix lets the
/// observer be sure the fault will come.
fn prognosis_run(g: &Automaton, table: &OracleTable) -> Result<Option<Witness>> {
    let boundary = boundary_states(g)?;
    let indicators = indicator_states(g)?;
    let cap = length_cap(g, table.depth());
    let mut best: Option<Vec<EventId>> = None;
    let (_, xn) = crate::fault::fault_annotations(g)?;
    // States after a silent fault are not indicators, so only the nominal
    // part of an estimate decides whether the fault can be predicted.
    let uncertain = |obs: &[EventId]| {
        table
            .current(obs)
            .is_some_and(|e| !e.intersection(&xn).all(|x| indicators.contains(x)))
    };
    // Pruning on observation prefixes keeps only strings whose every prefix
    // is uncertain.
    let keep = |obs: &[EventId]| uncertain(obs);
    if !uncertain(&[]) {
        return Ok(None);
    }
    for_each_string(
        g,
        g.initial(),
        table.depth(),
        cap,
        &keep,
        &mut |s, _, pairs| {
            if pairs.iter().any(|p| boundary.contains(&p.1))
                && best
                    .as_ref()
                    .is_none_or(|b| (s.len(), s) < (b.len(), b.as_slice()))
            {
                best = Some(s.to_vec());
            }
        },
    )?;
    Ok(best.map(|string| Witness::Run(RunWitness { string })))
}

/// Shortest run lasso: a string into a fault state x followed by a loop
/// back to x that shows at least one event and leaves an uncertain estimate
/// unchanged.
fn run_lasso(g: &Automaton, table: &OracleTable) -> Result<Option<Witness>> {
    let xf = g.fault_states().expect("checked").clone();
    let cap = length_cap(g, table.depth());
    let mut stems: Vec<(Vec<EventId>, Vec<EventId>, StateId)> = Vec::new();
    for_each_string(
        g,
        g.initial(),
        table.depth(),
        cap,
        &|_| true,
        &mut |s, obs, pairs| {
            let uncertain = table.current(obs).is_some_and(|e| !e.is_subset(&xf));
            if uncertain {
                for x in pairs.iter().map(|p| p.1).collect::<StateSet>() {
                    if xf.contains(&x) {
                        stems.push((s.to_vec(), obs.to_vec(), x));
                    }
                }
            }
        },
    )?;
    // Strings from x back to x showing at least one event, with their
    // projections, memoized per (x, observation room).
    let mut loops: HashMap<(StateId, usize), Vec<Lasso>> = HashMap::new();
    let mut best: Option<RunLassoWitness> = None;
    let size = |w: &RunLassoWitness| w.stem.len() + w.cycle.len();
    for (stem, obs, x) in stems {
        let room = table.depth() - obs.len();
        if room == 0 {
            continue;
        }
        if let std::collections::hash_map::Entry::Vacant(slot) = loops.entry((x, room)) {
            let mut found = Vec::new();
            for_each_string(
                g,
                &StateSet::from([x]),
                room,
                cap,
                &|_| true,
                &mut |s, o, pairs| {
                    if !o.is_empty() && pairs.iter().any(|p| p.1 == x) {
                        found.push((s.to_vec(), o.to_vec()));
                    }
                },
            )?;
            slot.insert(found);
        }
        let now = table.current(&obs);
        for (cycle, cobs) in &loops[&(x, room)] {
            let whole: Vec<EventId> = obs.iter().chain(cobs).copied().collect();
            if table.current(&whole) != now {
                continue;
            }
            let cand = RunLassoWitness {
                stem: stem.clone(),
                cycle: cycle.clone(),
                state: x,
            };
            if best.as_ref().is_none_or(|b| size(&cand) < size(b)) {
                best = Some(cand);
            }
        }
    }
    Ok(best.map(Witness::RunLasso))
}
