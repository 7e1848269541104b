//! Verification of observational properties, by observer constructions or
//! by the twin plant.

use std::fmt;
use std::str::FromStr;

use crate::automaton::{Automaton, StateId};
use crate::error::{Error, Precondition, Result};
use crate::estimate::Estimator;
use crate::verdict::Verdict;

pub mod observer;
pub mod replay;
pub mod twin;

/// Largest delay parameter accepted by delayed detectability. The layered
/// search is linear in the delay.
pub const MAX_DELAY: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Property {
    DetectabilityCurrent,
    DetectabilityInitial,
    DetectabilityDelayed { k1: usize, k2: usize },
    Diagnosability,
    Prognosability,
    Distinguishability,
    OpacityCurrent,
    OpacityInitial,
    OpacityInfinite,
}

impl Property {
    pub const NAMES: [&'static str; 9] = [
        "detectability-current",
        "detectability-initial",
        "detectability-delayed",
        "diagnosability",
        "prognosability",
        "distinguishability",
        "opacity-current",
        "opacity-initial",
        "opacity-infinite",
    ];

    pub fn name(self) -> &'static str {
        match self {
            Property::DetectabilityCurrent => "detectability-current",
            Property::DetectabilityInitial => "detectability-initial",
            Property::DetectabilityDelayed { .. } => "detectability-delayed",
            Property::Diagnosability => "diagnosability",
            Property::Prognosability => "prognosability",
            Property::Distinguishability => "distinguishability",
            Property::OpacityCurrent => "opacity-current",
            Property::OpacityInitial => "opacity-initial",
            Property::OpacityInfinite => "opacity-infinite",
        }
    }

    /// Whether a twin-plant verifier exists for this property.
    pub fn has_twin_plant(self) -> bool {
        matches!(
            self,
            Property::DetectabilityCurrent
                | Property::Diagnosability
                | Property::Distinguishability
                | Property::Prognosability
        )
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::DetectabilityDelayed { k1, k2 } => {
                write!(f, "{} (k1={k1}, k2={k2})", self.name())
            }
            _ => f.write_str(self.name()),
        }
    }
}

impl FromStr for Property {
    type Err = Error;

    /// Parses a property name; delayed detectability gets k1 = k2 = 0.
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "detectability-current" => Property::DetectabilityCurrent,
            "detectability-initial" => Property::DetectabilityInitial,
            "detectability-delayed" => Property::DetectabilityDelayed { k1: 0, k2: 0 },
            "diagnosability" => Property::Diagnosability,
            "prognosability" => Property::Prognosability,
            "distinguishability" => Property::Distinguishability,
            "opacity-current" => Property::OpacityCurrent,
            "opacity-initial" => Property::OpacityInitial,
            "opacity-infinite" => Property::OpacityInfinite,
            other => return Err(Error::Invalid(format!("unknown property `{other}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Method {
    Observer,
    TwinPlant,
    /// Twin plant where one exists, observer otherwise.
    #[default]
    Auto,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "observer" => Ok(Method::Observer),
            "twin-plant" => Ok(Method::TwinPlant),
            "auto" => Ok(Method::Auto),
            other => Err(Error::Invalid(format!("unknown method `{other}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PropertyQuery {
    pub property: Property,
    pub method: Method,
}

impl PropertyQuery {
    pub fn new(property: Property, method: Method) -> Result<Self> {
        if method == Method::TwinPlant && !property.has_twin_plant() {
            return Err(Error::Invalid(format!(
                "no twin-plant verifier for {}",
                property.name()
            )));
        }
        if let Property::DetectabilityDelayed { k1, k2 } = property {
            if k1.max(k2) > MAX_DELAY {
                return Err(Error::BoundExceeded {
                    bound: k1.max(k2),
                    limit: MAX_DELAY,
                });
            }
        }
        Ok(Self { property, method })
    }

    /// The concrete method `Auto` stands for.
    pub fn resolved_method(&self) -> Method {
        match self.method {
            Method::Auto if self.property.has_twin_plant() => Method::TwinPlant,
            Method::Auto => Method::Observer,
            m => m,
        }
    }
}

/// Runs a query. Assumptions and required annotations are re-checked on
/// every call.
pub fn verify(est: &Estimator, query: &PropertyQuery) -> Result<Verdict> {
    let q = PropertyQuery::new(query.property, query.method)?;
    let twin = q.resolved_method() == Method::TwinPlant;
    match q.property {
        Property::DetectabilityCurrent if twin => twin::detectability_current(est),
        Property::DetectabilityCurrent => observer::detectability_current(est),
        Property::DetectabilityInitial => observer::detectability_initial(est),
        Property::DetectabilityDelayed { k1, k2 } => observer::detectability_delayed(est, k1, k2),
        Property::Diagnosability if twin => twin::diagnosability(est),
        Property::Diagnosability => observer::diagnosability(est),
        Property::Prognosability if twin => twin::prognosability(est),
        Property::Prognosability => observer::prognosability(est),
        Property::Distinguishability if twin => twin::distinguishability(est),
        Property::Distinguishability => observer::distinguishability(est),
        Property::OpacityCurrent => observer::opacity_current(est),
        Property::OpacityInitial => observer::opacity_initial(est),
        Property::OpacityInfinite => observer::opacity_infinite(est),
    }
}

pub(crate) fn spec_pairs(g: &Automaton) -> Result<&std::collections::BTreeSet<(StateId, StateId)>> {
    g.spec_pairs()
        .ok_or_else(|| Precondition::MissingAnnotation("spec-pair").into())
}

pub(crate) fn secret(g: &Automaton) -> Result<&crate::automaton::StateSet> {
    g.secret()
        .ok_or_else(|| Precondition::MissingAnnotation("secret").into())
}

/// Diagnosability additionally needs every fault event to be unobservable.
pub(crate) fn require_unobservable_faults(g: &Automaton) -> Result<()> {
    crate::fault::fault_annotations(g)?;
    let faults = g.fault_events().expect("checked above");
    if let Some(&e) = faults.iter().find(|&&e| g.alphabet().is_observable(e)) {
        return Err(Precondition::ObservableFaultEvent(g.alphabet().name(e).to_string()).into());
    }
    Ok(())
}

/// T = ∂(G) × (X_N \ ℑ(G)), the pair specification prognosability reduces to.
pub fn prognosis_spec(g: &Automaton) -> Result<std::collections::BTreeSet<(StateId, StateId)>> {
    let boundary = crate::fault::boundary_states(g)?;
    let indicators = crate::fault::indicator_states(g)?;
    let xn = g.nonfault_states().expect("fault annotations checked");
    Ok(boundary
        .iter()
        .flat_map(|&b| {
            xn.iter()
                .filter(|x| !indicators.contains(x))
                .map(move |&x| (b, x))
        })
        .collect())
}
