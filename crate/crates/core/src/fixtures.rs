//! The bundled fixture corpus, embedded at compile time.

use crate::automaton::Automaton;
use crate::io::text;

pub const NAMES: [&str; 10] = [
    "F1", "F2a", "F2b", "F3a", "F3b", "F4", "F4b", "F5", "F5b", "F6",
];

macro_rules! fixture_text {
    ($($name:literal),*) => {
        /// Source text of a bundled fixture.
        pub fn source(name: &str) -> Option<&'static str> {
            match name {
                $($name => Some(include_str!(concat!("../../../fixtures/", $name, ".des"))),)*
                _ => None,
            }
        }
    };
}

fixture_text!("F1", "F2a", "F2b", "F3a", "F3b", "F4", "F4b", "F5", "F5b", "F6");

/// Parses a bundled fixture. Panics on an unknown name; the corpus is
/// static, so a parse failure is a bug.
pub fn load(name: &str) -> Automaton {
    let src = source(name).unwrap_or_else(|| panic!("no fixture named {name}"));
    text::parse(src)
        .unwrap_or_else(|e| panic!("fixture {name} does not parse: {e}"))
        .0
}

/// Every fixture, in corpus order.
pub fn all() -> Vec<(&'static str, Automaton)> {
    NAMES.iter().map(|&n| (n, load(n))).collect()
}
