//! The partially-observed NFA model.
//!
//! States and events are dense integer ids. Display names are carried along
//! for reports but never take part in comparisons: two states with the same
//! name are still distinct states.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub usize);

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EventId(pub usize);

impl StateId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl EventId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Canonical (sorted) set of states. Estimates, observer states and
/// annotations all use this representation.
pub type StateSet = BTreeSet<StateId>;

pub(crate) const RESERVED: [char; 3] = ['#', ',', '|'];

/// Checks the token rules shared by event names and textual state ids.
pub(crate) fn check_token(kind: &str, name: &str) -> Result<()> {
    if name.is_empty() {
        return Err(Error::Invalid(format!("empty {kind} name")));
    }
    if name
        .chars()
        .any(|c| c.is_whitespace() || RESERVED.contains(&c))
    {
        return Err(Error::Invalid(format!(
            "{kind} name `{name}` contains whitespace or one of `#`, `,`, `|`"
        )));
    }
    Ok(())
}

/// Event set with its observable/unobservable partition.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Alphabet {
    names: Vec<String>,
    observable: Vec<bool>,
    lookup: HashMap<String, EventId>,
}

impl Alphabet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, name: &str, observable: bool) -> Result<EventId> {
        check_token("event", name)?;
        if self.lookup.contains_key(name) {
            return Err(Error::Invalid(format!("duplicate event `{name}`")));
        }
        let id = EventId(self.names.len());
        self.names.push(name.to_string());
        self.observable.push(observable);
        self.lookup.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, e: EventId) -> &str {
        &self.names[e.0]
    }

    pub fn id(&self, name: &str) -> Option<EventId> {
        self.lookup.get(name).copied()
    }

    pub fn contains(&self, e: EventId) -> bool {
        e.0 < self.names.len()
    }

    pub fn is_observable(&self, e: EventId) -> bool {
        self.observable[e.0]
    }

    pub fn events(&self) -> impl Iterator<Item = EventId> + '_ {
        (0..self.names.len()).map(EventId)
    }

    pub fn observable(&self) -> impl Iterator<Item = EventId> + '_ {
        self.events().filter(|&e| self.observable[e.0])
    }

    pub fn unobservable(&self) -> impl Iterator<Item = EventId> + '_ {
        self.events().filter(|&e| !self.observable[e.0])
    }

    /// Parses a whitespace-separated list of observable event names.
    pub fn parse_trace(&self, text: &str) -> Result<ObservationTrace> {
        let events = text
            .split_whitespace()
            .map(|tok| {
                self.id(tok)
                    .ok_or_else(|| Error::UnknownEvent(tok.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        ObservationTrace::new(self, events)
    }

    /// Space-separated event names, or `ε` for the empty string.
    pub fn format(&self, events: &[EventId]) -> String {
        if events.is_empty() {
            return "ε".to_string();
        }
        events
            .iter()
            .map(|&e| self.name(e))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// A string of observable events.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObservationTrace(Vec<EventId>);

impl ObservationTrace {
    pub fn new(alphabet: &Alphabet, events: Vec<EventId>) -> Result<Self> {
        for &e in &events {
            if !alphabet.contains(e) {
                return Err(Error::UnknownEvent(format!("#{}", e.0)));
            }
            if !alphabet.is_observable(e) {
                return Err(Error::NotObservable(alphabet.name(e).to_string()));
            }
        }
        Ok(Self(events))
    }

    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn reversed(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn into_inner(self) -> Vec<EventId> {
        self.0
    }

    /// Splits into the first `k` events and the rest.
    pub fn split_at(&self, k: usize) -> Option<(Self, Self)> {
        if k > self.0.len() {
            return None;
        }
        let (a, b) = self.0.split_at(k);
        Some((Self(a.to_vec()), Self(b.to_vec())))
    }
}

impl Deref for ObservationTrace {
    type Target = [EventId];

    fn deref(&self) -> &[EventId] {
        &self.0
    }
}

/// Natural projection: erases the unobservable events of `trace`.
pub fn project(trace: &[EventId], alphabet: &Alphabet) -> Result<ObservationTrace> {
    let mut out = Vec::with_capacity(trace.len());
    for &e in trace {
        if !alphabet.contains(e) {
            return Err(Error::UnknownEvent(format!("#{}", e.0)));
        }
        if alphabet.is_observable(e) {
            out.push(e);
        }
    }
    Ok(ObservationTrace(out))
}

/// A partially-observed nondeterministic automaton together with its
/// optional fault, secret and state-pair annotations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Automaton {
    names: Vec<String>,
    alphabet: Alphabet,
    delta: Vec<BTreeMap<EventId, StateSet>>,
    initial: StateSet,
    fault_events: Option<BTreeSet<EventId>>,
    fault_states: Option<StateSet>,
    secret: Option<StateSet>,
    spec_pairs: Option<BTreeSet<(StateId, StateId)>>,
}

impl Automaton {
    /// Assembles an automaton from trusted parts. Used by constructions whose
    /// output is valid by construction.
    pub(crate) fn from_parts(
        names: Vec<String>,
        alphabet: Alphabet,
        delta: Vec<BTreeMap<EventId, StateSet>>,
        initial: StateSet,
    ) -> Self {
        debug_assert_eq!(names.len(), delta.len());
        Self {
            names,
            alphabet,
            delta,
            initial,
            fault_events: None,
            fault_states: None,
            secret: None,
            spec_pairs: None,
        }
    }

    pub fn num_states(&self) -> usize {
        self.names.len()
    }

    pub fn states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.names.len()).map(StateId)
    }

    pub fn all_states(&self) -> StateSet {
        self.states().collect()
    }

    pub fn name(&self, x: StateId) -> &str {
        &self.names[x.0]
    }

    /// First state carrying the display name `name`.
    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.names.iter().position(|n| n == name).map(StateId)
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> &StateSet {
        &self.initial
    }

    pub fn successors(&self, x: StateId, e: EventId) -> Option<&StateSet> {
        self.delta[x.0].get(&e)
    }

    /// Outgoing transitions of `x`, ordered by event then target.
    pub fn out_edges(&self, x: StateId) -> impl Iterator<Item = (EventId, StateId)> + '_ {
        self.delta[x.0]
            .iter()
            .flat_map(|(&e, ys)| ys.iter().map(move |&y| (e, y)))
    }

    pub fn enabled(&self, x: StateId) -> impl Iterator<Item = EventId> + '_ {
        self.delta[x.0].keys().copied()
    }

    /// All transitions `(source, event, target)` in canonical order.
    pub fn transitions(&self) -> impl Iterator<Item = (StateId, EventId, StateId)> + '_ {
        self.states()
            .flat_map(move |x| self.out_edges(x).map(move |(e, y)| (x, e, y)))
    }

    pub fn num_transitions(&self) -> usize {
        self.delta
            .iter()
            .map(|m| m.values().map(BTreeSet::len).sum::<usize>())
            .sum()
    }

    pub fn fault_events(&self) -> Option<&BTreeSet<EventId>> {
        self.fault_events.as_ref()
    }

    pub fn fault_states(&self) -> Option<&StateSet> {
        self.fault_states.as_ref()
    }

    /// X_N, the complement of the fault states, when a partition is present.
    pub fn nonfault_states(&self) -> Option<StateSet> {
        self.fault_states
            .as_ref()
            .map(|f| self.states().filter(|x| !f.contains(x)).collect())
    }

    pub fn secret(&self) -> Option<&StateSet> {
        self.secret.as_ref()
    }

    pub fn spec_pairs(&self) -> Option<&BTreeSet<(StateId, StateId)>> {
        self.spec_pairs.as_ref()
    }

    pub fn is_fault_event(&self, e: EventId) -> bool {
        self.fault_events.as_ref().is_some_and(|f| f.contains(&e))
    }

    /// Replaces the secret set.
    pub fn with_secret(mut self, secret: StateSet) -> Result<Self> {
        self.check_states(&secret)?;
        self.secret = Some(secret);
        Ok(self)
    }

    /// Replaces the state-pair specification; the stored set is closed under
    /// swapping. Returns a warning when the input was not already symmetric.
    pub fn with_spec_pairs(
        mut self,
        pairs: impl IntoIterator<Item = (StateId, StateId)>,
    ) -> Result<(Self, Option<String>)> {
        let given: BTreeSet<_> = pairs.into_iter().collect();
        for &(a, b) in &given {
            self.check_states(&[a, b].into_iter().collect())?;
        }
        let (closed, warning) = symmetrize(&self.names, given);
        self.spec_pairs = Some(closed);
        Ok((self, warning))
    }

    pub(crate) fn set_annotations(
        &mut self,
        fault_events: Option<BTreeSet<EventId>>,
        fault_states: Option<StateSet>,
        secret: Option<StateSet>,
        spec_pairs: Option<BTreeSet<(StateId, StateId)>>,
    ) {
        self.fault_events = fault_events;
        self.fault_states = fault_states;
        self.secret = secret;
        self.spec_pairs = spec_pairs;
    }

    fn check_states(&self, set: &StateSet) -> Result<()> {
        match set.iter().find(|x| x.0 >= self.names.len()) {
            Some(x) => Err(Error::UnknownState(format!("#{}", x.0))),
            None => Ok(()),
        }
    }

    /// δ(from, s): states reachable from `from` along exactly the string `s`.
    pub fn extended_step(&self, from: &StateSet, s: &[EventId]) -> Result<StateSet> {
        if let Some(e) = s.iter().find(|e| !self.alphabet.contains(**e)) {
            return Err(Error::UnknownEvent(format!("#{}", e.0)));
        }
        self.check_states(from)?;
        let mut cur = from.clone();
        for &e in s {
            cur = self.step(&cur, e);
            if cur.is_empty() {
                break;
            }
        }
        Ok(cur)
    }

    /// One-event image of a state set (no closure).
    pub fn step(&self, from: &StateSet, e: EventId) -> StateSet {
        from.iter()
            .filter_map(|&x| self.successors(x, e))
            .flatten()
            .copied()
            .collect()
    }

    /// Least superset of `seed` closed under unobservable transitions.
    pub fn unobservable_reach(&self, seed: &StateSet) -> StateSet {
        let mut reach = seed.clone();
        let mut stack: Vec<StateId> = seed.iter().copied().collect();
        while let Some(x) = stack.pop() {
            for (e, y) in self.out_edges(x) {
                if !self.alphabet.is_observable(e) && reach.insert(y) {
                    stack.push(y);
                }
            }
        }
        reach
    }

    /// UR(δ(q, σ)): the observer successor of `q` on observable `e`.
    pub fn observable_step(&self, q: &StateSet, e: EventId) -> StateSet {
        let image = self.step(q, e);
        if image.is_empty() {
            image
        } else {
            self.unobservable_reach(&image)
        }
    }

    /// Renders a state set as `{a,b,c}` using display names.
    pub fn format_set(&self, set: &StateSet) -> String {
        let inner: Vec<&str> = set.iter().map(|&x| self.name(x)).collect();
        format!("{{{}}}", inner.join(","))
    }

    /// Renders a state set as space-separated display names.
    pub fn format_ids(&self, set: &StateSet) -> String {
        set.iter()
            .map(|&x| self.name(x))
            .collect::<Vec<_>>()
            .join(" ")
    }
}

fn symmetrize(
    names: &[String],
    given: BTreeSet<(StateId, StateId)>,
) -> (BTreeSet<(StateId, StateId)>, Option<String>) {
    let missing: Vec<_> = given
        .iter()
        .filter(|&&(a, b)| !given.contains(&(b, a)))
        .copied()
        .collect();
    let warning = (!missing.is_empty()).then(|| {
        let listed: Vec<String> = missing
            .iter()
            .map(|&(a, b)| format!("({},{})", names[a.0], names[b.0]))
            .collect();
        format!(
            "spec pairs are not symmetric; added the swapped counterparts of {}",
            listed.join(" ")
        )
    });
    let mut closed = given;
    for (a, b) in missing {
        closed.insert((b, a));
    }
    (closed, warning)
}

/// Incremental construction of a validated [`Automaton`].
#[derive(Debug, Default)]
pub struct AutomatonBuilder {
    names: Vec<String>,
    alphabet: Alphabet,
    transitions: Vec<(StateId, EventId, StateId)>,
    initial: StateSet,
    fault_events: Option<BTreeSet<EventId>>,
    fault_states: Option<StateSet>,
    secret: Option<StateSet>,
    spec_pairs: Option<BTreeSet<(StateId, StateId)>>,
}

impl AutomatonBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_state(&mut self, name: impl Into<String>) -> StateId {
        self.names.push(name.into());
        StateId(self.names.len() - 1)
    }

    pub fn add_event(&mut self, name: &str, observable: bool) -> Result<EventId> {
        self.alphabet.add(name, observable)
    }

    pub fn add_transition(&mut self, src: StateId, e: EventId, dst: StateId) -> &mut Self {
        self.transitions.push((src, e, dst));
        self
    }

    pub fn add_initial(&mut self, x: StateId) -> &mut Self {
        self.initial.insert(x);
        self
    }

    pub fn fault_events(&mut self, events: impl IntoIterator<Item = EventId>) -> &mut Self {
        self.fault_events = Some(events.into_iter().collect());
        self
    }

    pub fn fault_states(&mut self, states: impl IntoIterator<Item = StateId>) -> &mut Self {
        self.fault_states = Some(states.into_iter().collect());
        self
    }

    pub fn secret(&mut self, states: impl IntoIterator<Item = StateId>) -> &mut Self {
        self.secret = Some(states.into_iter().collect());
        self
    }

    pub fn spec_pair(&mut self, a: StateId, b: StateId) -> &mut Self {
        self.spec_pairs
            .get_or_insert_with(BTreeSet::new)
            .insert((a, b));
        self
    }

    /// Validates every model invariant and returns the automaton together with
    /// non-fatal warnings.
    pub fn build(self) -> Result<(Automaton, Vec<String>)> {
        let mut warnings = Vec::new();
        let n = self.names.len();
        let in_range = |x: StateId| x.0 < n;
        let bad_state = |x: StateId| Error::UnknownState(format!("#{}", x.0));

        if self.initial.is_empty() {
            return Err(Error::Invalid("initial state set is empty".into()));
        }
        let mut delta = vec![BTreeMap::<EventId, StateSet>::new(); n];
        for &(x, e, y) in &self.transitions {
            if let Some(z) = [x, y].into_iter().find(|&z| !in_range(z)) {
                return Err(bad_state(z));
            }
            if !self.alphabet.contains(e) {
                return Err(Error::UnknownEvent(format!("#{}", e.0)));
            }
            delta[x.0].entry(e).or_default().insert(y);
        }
        for set in [
            Some(&self.initial),
            self.fault_states.as_ref(),
            self.secret.as_ref(),
        ]
        .into_iter()
        .flatten()
        {
            if let Some(&x) = set.iter().find(|&&x| !in_range(x)) {
                return Err(bad_state(x));
            }
        }
        if let Some(fe) = &self.fault_events {
            if let Some(e) = fe.iter().find(|e| !self.alphabet.contains(**e)) {
                return Err(Error::UnknownEvent(format!("#{}", e.0)));
            }
        }

        let mut seen = HashMap::new();
        for (i, name) in self.names.iter().enumerate() {
            if let Some(j) = seen.insert(name.as_str(), i) {
                warnings.push(format!(
                    "states #{j} and #{i} share the display name `{name}`"
                ));
            }
        }

        let mut automaton = Automaton {
            names: self.names,
            alphabet: self.alphabet,
            delta,
            initial: self.initial,
            fault_events: self.fault_events,
            fault_states: self.fault_states,
            secret: self.secret,
            spec_pairs: None,
        };
        if let Some(pairs) = self.spec_pairs {
            for &(a, b) in &pairs {
                for x in [a, b] {
                    if x.0 >= automaton.names.len() {
                        return Err(bad_state(x));
                    }
                }
            }
            let (closed, warning) = symmetrize(&automaton.names, pairs);
            warnings.extend(warning);
            automaton.spec_pairs = Some(closed);
        }
        check_fault_partition(&automaton)?;
        Ok((automaton, warnings))
    }
}

/// Scans the transition relation for the fault-partition invariants: initial
/// states are non-faulty, fault events lead into X_F, other events keep X_N
/// states in X_N, and X_F is absorbing.
fn check_fault_partition(g: &Automaton) -> Result<()> {
    let Some(xf) = g.fault_states() else {
        return Ok(());
    };
    if let Some(&x) = g.initial().iter().find(|x| xf.contains(x)) {
        return Err(Error::Invalid(format!(
            "initial state `{}` is a fault state",
            g.name(x)
        )));
    }
    for (x, e, y) in g.transitions() {
        let src_fault = xf.contains(&x);
        let dst_fault = xf.contains(&y);
        let ev = g.alphabet().name(e);
        if src_fault && !dst_fault {
            return Err(Error::Invalid(format!(
                "fault states must be absorbing: `{}` -{ev}-> `{}` leaves X_F",
                g.name(x),
                g.name(y)
            )));
        }
        if g.is_fault_event(e) && !dst_fault {
            return Err(Error::Invalid(format!(
                "fault event `{ev}` must lead into X_F: `{}` -{ev}-> `{}`",
                g.name(x),
                g.name(y)
            )));
        }
        if !src_fault && !g.is_fault_event(e) && dst_fault {
            return Err(Error::Invalid(format!(
                "non-fault event `{ev}` enters X_F: `{}` -{ev}-> `{}`",
                g.name(x),
                g.name(y)
            )));
        }
    }
    Ok(())
}

impl fmt::Display for Automaton {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} states, {} events ({} unobservable), {} transitions",
            self.num_states(),
            self.alphabet.len(),
            self.alphabet.unobservable().count(),
            self.num_transitions()
        )
    }
}
