//! State estimation and verification of observational properties for
//! partially-observed discrete-event systems modeled as nondeterministic
//! finite automata.
//!
//! The crate is organised bottom-up:
//!
//! * [`automaton`]: the model, natural projection and set-valued stepping;
//! * [`construct`], [`assumptions`], [`fault`]: derived automata, the
//!   liveness/acyclicity assumptions and the fault structure;
//! * [`observer`], [`estimate`]: subset-construction observers and the
//!   current, initial and delayed state estimators;
//! * [`verify`], [`twin`]: observer-based and twin-plant verifiers;
//! * [`oracle`]: brute-force reference semantics and a random model
//!   generator used for cross-validation;
//! * [`io`]: the text and JSON model formats and DOT export.

pub mod assumptions;
pub mod automaton;
pub mod construct;
pub mod error;
pub mod estimate;
pub mod fault;
pub mod fixtures;
pub mod graph;
pub mod io;
pub mod observer;
pub mod oracle;
pub mod twin;
pub mod verdict;
pub mod verify;

pub use automaton::{
    project, Alphabet, Automaton, AutomatonBuilder, EventId, ObservationTrace, StateId, StateSet,
};
pub use error::{Error, Precondition, Result};
pub use estimate::{EstimateKind, Estimator, EstimatorSession, StateEstimate};
pub use observer::Observer;
pub use twin::{PairEvent, TwinPlant};
pub use verdict::{Verdict, Witness, WitnessKind};
pub use verify::{Method, Property, PropertyQuery};
