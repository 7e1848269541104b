//! Model files and DOT export.
//!
//! Both file formats go through [`ModelDocument`], a name-based mirror of an
//! automaton with the same field names as the text format.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::automaton::{check_token, Automaton, AutomatonBuilder, EventId, StateId};
use crate::error::{Error, Result};

pub mod dot;
pub mod json;
pub mod text;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct ModelDocument {
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub events: Vec<String>,
    #[serde(default)]
    pub observable: Vec<String>,
    #[serde(default)]
    pub trans: Vec<[String; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_events: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fault_states: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub secret: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec_pair: Option<Vec<[String; 2]>>,
}

impl ModelDocument {
    /// Canonical document of `g`: states and events in id order, sets
    /// sorted by id, transitions by (source, event, target).
    pub fn from_automaton(g: &Automaton) -> Self {
        let st = |x: StateId| g.name(x).to_string();
        let ev = |e: EventId| g.alphabet().name(e).to_string();
        ModelDocument {
            states: g.states().map(st).collect(),
            initial: g.initial().iter().map(|&x| st(x)).collect(),
            events: g.alphabet().events().map(ev).collect(),
            observable: g.alphabet().observable().map(ev).collect(),
            trans: g
                .transitions()
                .map(|(x, e, y)| [st(x), ev(e), st(y)])
                .collect(),
            fault_events: g.fault_events().map(|f| f.iter().map(|&e| ev(e)).collect()),
            fault_states: g.fault_states().map(|f| f.iter().map(|&x| st(x)).collect()),
            secret: g.secret().map(|s| s.iter().map(|&x| st(x)).collect()),
            spec_pair: g
                .spec_pairs()
                .map(|t| t.iter().map(|&(a, b)| [st(a), st(b)]).collect()),
        }
    }

    /// Validates the document. Names resolve to the first state declared
    /// with that name; duplicates are reported as warnings.
    pub fn to_automaton(&self) -> Result<(Automaton, Vec<String>)> {
        let mut b = AutomatonBuilder::new();
        let mut states: HashMap<&str, StateId> = HashMap::new();
        for name in &self.states {
            check_token("state", name)?;
            let id = b.add_state(name.clone());
            states.entry(name).or_insert(id);
        }
        let state = |name: &String| {
            states
                .get(name.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownState(name.clone()))
        };
        for name in &self.observable {
            if !self.events.contains(name) {
                return Err(Error::Invalid(format!(
                    "observable event `{name}` is not declared in `events`"
                )));
            }
        }
        let mut events = HashMap::new();
        for name in &self.events {
            let id = b.add_event(name, self.observable.contains(name))?;
            events.insert(name.as_str(), id);
        }
        let event = |name: &String| {
            events
                .get(name.as_str())
                .copied()
                .ok_or_else(|| Error::UnknownEvent(name.clone()))
        };
        for x in &self.initial {
            b.add_initial(state(x)?);
        }
        for [x, e, y] in &self.trans {
            b.add_transition(state(x)?, event(e)?, state(y)?);
        }
        if let Some(fe) = &self.fault_events {
            b.fault_events(fe.iter().map(event).collect::<Result<Vec<_>>>()?);
        }
        if let Some(fs) = &self.fault_states {
            b.fault_states(fs.iter().map(state).collect::<Result<Vec<_>>>()?);
        }
        if self.fault_events.is_some() != self.fault_states.is_some() {
            return Err(Error::Invalid(
                "`fault-events` and `fault-states` must be given together".into(),
            ));
        }
        if let Some(s) = &self.secret {
            b.secret(s.iter().map(state).collect::<Result<Vec<_>>>()?);
        }
        if let Some(t) = &self.spec_pair {
            for [x, y] in t {
                b.spec_pair(state(x)?, state(y)?);
            }
        }
        b.build()
    }
}

/// Reads a model file; `.json` files use the JSON mirror, anything else the
/// text format.
pub fn load_model(path: impl AsRef<Path>) -> Result<(Automaton, Vec<String>)> {
    let path = path.as_ref();
    let src = std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })?;
    if path.extension().is_some_and(|e| e == "json") {
        json::parse(&src)
    } else {
        text::parse(&src)
    }
}
