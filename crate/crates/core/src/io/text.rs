//! The line-based model format.
//!
//! ```text
//! # comment
//! states: 0 1 2
//! initial: 0
//! events: a u
//! observable: a
//! trans: 0 a 1
//! trans: 0 u 2
//! ```
//!
//! `trans:` and `spec-pair:` repeat; every other key appears at most once.

use super::ModelDocument;
use crate::automaton::Automaton;
use crate::error::{Error, Result};

fn syntax(line: usize, column: usize, message: impl Into<String>) -> Error {
    Error::Syntax {
        line,
        column,
        message: message.into(),
    }
}

/// Splits `s` into whitespace-separated tokens with their 1-based columns,
/// counted in characters from `offset`.
fn tokens(s: &str, offset: usize) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    let mut col = offset;
    for (i, c) in s.char_indices() {
        col += 1;
        match (c.is_whitespace(), start) {
            (false, None) => start = Some((i, col)),
            (true, Some((b, bc))) => {
                out.push((bc, &s[b..i]));
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, bc)) = start {
        out.push((bc, &s[b..]));
    }
    out
}

/// Parses the text format into its document without checking names.
pub fn parse_document(src: &str) -> Result<ModelDocument> {
    let mut doc = ModelDocument::default();
    let mut seen: Vec<&str> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("");
        let Some(first) = tokens(body, 0).first().map(|t| t.0) else {
            continue;
        };
        let Some(colon) = body.find(':') else {
            return Err(syntax(line, first, "expected `key: values`"));
        };
        let key = body[..colon].trim();
        let values = tokens(&body[colon + 1..], body[..=colon].chars().count());
        let names = || values.iter().map(|t| t.1.to_string()).collect::<Vec<_>>();
        let end = body.chars().count() + 1;
        let arity = |n: usize| -> Result<Vec<String>> {
            match values.get(n) {
                Some(&(col, tok)) => Err(syntax(
                    line,
                    col,
                    format!("unexpected `{tok}` after {n} values"),
                )),
                None if values.len() < n => Err(syntax(
                    line,
                    end,
                    format!("`{key}:` takes {n} values, found {}", values.len()),
                )),
                None => Ok(names()),
            }
        };
        match key {
            "trans" => {
                let v = arity(3)?;
                doc.trans.push([v[0].clone(), v[1].clone(), v[2].clone()]);
                continue;
            }
            "spec-pair" => {
                let v = arity(2)?;
                doc.spec_pair
                    .get_or_insert_with(Vec::new)
                    .push([v[0].clone(), v[1].clone()]);
                continue;
            }
            _ => {}
        }
        let slot = match key {
            "states" | "initial" | "events" | "observable" | "fault-events" | "fault-states"
            | "secret" => key,
            _ => return Err(syntax(line, first, format!("unknown key `{key}`"))),
        };
        if seen.contains(&slot) {
            return Err(syntax(line, first, format!("`{key}:` given twice")));
        }
        seen.push(slot);
        if values.is_empty() && matches!(key, "states" | "initial" | "events") {
            return Err(syntax(
                line,
                end,
                format!("`{key}:` needs at least one value"),
            ));
        }
        match key {
            "states" => doc.states = names(),
            "initial" => doc.initial = names(),
            "events" => doc.events = names(),
            "observable" => doc.observable = names(),
            "fault-events" => doc.fault_events = Some(names()),
            "fault-states" => doc.fault_states = Some(names()),
            _ => doc.secret = Some(names()),
        }
    }
    for key in ["states", "initial", "events"] {
        if !seen.contains(&key) {
            return Err(Error::Invalid(format!("missing `{key}:` line")));
        }
    }
    Ok(doc)
}

/// Parses and validates a model; returns it with non-fatal warnings.
pub fn parse(src: &str) -> Result<(Automaton, Vec<String>)> {
    parse_document(src)?.to_automaton()
}

/// Canonical text of `g`. Parsing it back yields an equal automaton when
/// state names are distinct valid tokens.
pub fn serialize(g: &Automaton) -> String {
    let doc = ModelDocument::from_automaton(g);
    let mut out = String::new();
    let mut line = |key: &str, v: &[String]| {
        out.push_str(key);
        out.push(':');
        for s in v {
            out.push(' ');
            out.push_str(s);
        }
        out.push('\n');
    };
    line("states", &doc.states);
    line("initial", &doc.initial);
    line("events", &doc.events);
    line("observable", &doc.observable);
    for (key, v) in [
        ("fault-events", &doc.fault_events),
        ("fault-states", &doc.fault_states),
        ("secret", &doc.secret),
    ] {
        if let Some(v) = v {
            line(key, v);
        }
    }
    for t in &doc.trans {
        line("trans", t);
    }
    for p in doc.spec_pair.iter().flatten() {
        line("spec-pair", p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn syntax_at(src: &str) -> (usize, usize) {
        match parse(src) {
            Err(Error::Syntax { line, column, .. }) => (line, column),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn f1_shape() {
        let (g, warnings) = parse(fixtures::source("F1").unwrap()).unwrap();
        assert!(warnings.is_empty());
        assert_eq!(g.num_states(), 4);
        assert_eq!(g.alphabet().len(), 3);
        assert_eq!(g.alphabet().unobservable().count(), 1);
    }

    #[test]
    fn round_trip_all_fixtures() {
        for (name, g) in fixtures::all() {
            let text = serialize(&g);
            let back = parse(&text).unwrap().0;
            assert_eq!(back, g, "{name}");
            assert_eq!(serialize(&back), text, "{name}");
        }
    }

    #[test]
    fn undeclared_observable_event() {
        let src = "states: 0\ninitial: 0\nevents: a\nobservable: a b\ntrans: 0 a 0\n";
        assert!(matches!(parse(src), Err(Error::Invalid(m)) if m.contains("`b`")));
    }

    #[test]
    fn syntax_positions() {
        assert_eq!(syntax_at("states: 0\nbogus: 1\n"), (2, 1));
        assert_eq!(syntax_at("states: 0\n  trans: 0 a 0 0\n"), (2, 16));
        assert_eq!(syntax_at("states: 0\ntrans: 0 a\n"), (2, 11));
        assert_eq!(syntax_at("states 0\n"), (1, 1));
        assert_eq!(syntax_at("states: 0\nstates: 1\n"), (2, 1));
        assert_eq!(syntax_at("initial:   # none\n"), (1, 12));
    }

    #[test]
    fn comments_and_blank_lines() {
        let src =
            "# c\n\nstates: 0 # trailing\ninitial: 0\nevents: a\nobservable: a\ntrans: 0 a 0\n";
        assert_eq!(parse(src).unwrap().0.num_states(), 1);
    }

    #[test]
    fn warnings() {
        let src = "states: 0 1\ninitial: 0\nevents: a\nobservable: a\ntrans: 0 a 1\ntrans: 1 a 1\nspec-pair: 0 1\n";
        let (g, w) = parse(src).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(g.spec_pairs().unwrap().len(), 2);
        let dup = "states: 0 0\ninitial: 0\nevents: a\nobservable: a\ntrans: 0 a 0\n";
        let (g, w) = parse(dup).unwrap();
        assert_eq!((g.num_states(), w.len()), (2, 1));
    }

    #[test]
    fn semantic_errors() {
        let base = "states: 0 1\ninitial: 0\nevents: a f\nobservable: a\n";
        assert!(matches!(
            parse(&format!("{base}trans: 0 a 2\n")),
            Err(Error::UnknownState(_))
        ));
        assert!(matches!(
            parse(&format!("{base}trans: 0 b 1\n")),
            Err(Error::UnknownEvent(_))
        ));
        let fault = format!("{base}fault-events: f\nfault-states: 1\ntrans: 0 a 1\ntrans: 1 a 1\n");
        assert!(matches!(parse(&fault), Err(Error::Invalid(_))));
        assert!(matches!(
            parse("states: 0\nevents: a\n"),
            Err(Error::Invalid(_))
        ));
    }
}
