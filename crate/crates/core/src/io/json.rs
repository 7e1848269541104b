use super::ModelDocument;
use crate::automaton::Automaton;
use crate::error::Result;

pub fn parse(src: &str) -> Result<(Automaton, Vec<String>)> {
    serde_json::from_str::<ModelDocument>(src)?.to_automaton()
}

pub fn serialize(g: &Automaton) -> String {
    let mut s = serde_json::to_string_pretty(&ModelDocument::from_automaton(g))
        .expect("documents always serialize");
    s.push('\n');
    s
}
