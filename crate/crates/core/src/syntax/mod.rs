//! Concrete syntax for rules, facts and queries.
//!
//! ```text
//! % comments run to end of line
//! r1: Bat(x) -> CanFly(x).
//! r2: Bat(x) -> exists y . LiveIn(x, y), Cave(y).
//! r4: Mammal(x), not CanFly(x) -> CanNotFly(x).
//! r7: Bird(x), Mammal(x) -> bottom.
//! @priority 1 = r1, r2.
//! @priority 2 = r4, r7.
//! @weight r1 = 1.
//! ```
//!
//! Term convention: an identifier made of one letter in `u`–`z` followed only
//! by digits or primes (`x`, `y1`, `z'`) is a variable; every other identifier,
//! integer or double-quoted string is a constant. Unlabelled rules get the
//! labels `r1`, `r2`, … by position.

mod error;
mod lexer;
pub mod output;
mod parser;

use std::collections::BTreeMap;
use std::fmt;

pub use error::{ParseError, ParseErrorKind, Pos};
pub use parser::{parse_database, parse_program, parse_query};

use crate::model::{Label, ModelError, PreferenceKind, PreferenceSpec, RuleSet};

/// A parsed rule file.
#[derive(Clone, Debug)]
pub struct ProgramDocument {
    pub rules: RuleSet,
    pub prioritization: Option<Vec<Vec<Label>>>,
    pub weights: Option<BTreeMap<Label, i64>>,
    /// Start position of each rule, parallel to `rules`.
    pub spans: Vec<Pos>,
}

impl PartialEq for ProgramDocument {
    fn eq(&self, other: &Self) -> bool {
        self.rules == other.rules && self.prioritization == other.prioritization && self.weights == other.weights
    }
}

impl ProgramDocument {
    /// Builds and validates the preference of `kind` from the document's directives.
    pub fn preference(&self, kind: PreferenceKind) -> Result<PreferenceSpec, ModelError> {
        let spec = PreferenceSpec {
            kind,
            prioritization: if kind.needs_prioritization() {
                self.prioritization.clone().unwrap_or_default()
            } else {
                Vec::new()
            },
            weights: if kind == PreferenceKind::Weight { self.weights.clone().unwrap_or_default() } else { BTreeMap::new() },
        };
        spec.validate(&self.rules)?;
        Ok(spec)
    }
}

impl fmt::Display for ProgramDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.rules {
            writeln!(f, "{r}")?;
        }
        if let Some(levels) = &self.prioritization {
            for (i, level) in levels.iter().enumerate() {
                let names: Vec<String> = level.iter().map(Label::to_string).collect();
                writeln!(f, "@priority {} = {}.", i + 1, names.join(", "))?;
            }
        }
        if let Some(w) = &self.weights {
            for (l, n) in w {
                writeln!(f, "@weight {l} = {n}.")?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    const EX1: &str = include_str!("../../../../data/ex1.rules");

    #[test]
    fn example_document_round_trips() {
        let doc = parse_program(EX1).unwrap();
        assert_eq!(doc.rules.len(), 7);
        let again = parse_program(&doc.to_string()).unwrap();
        assert_eq!(doc, again);
    }

    fn arb_program() -> impl Strategy<Value = String> {
        let var = prop::sample::select(vec!["x", "y", "z"]);
        let cst = prop::sample::select(vec!["a", "b", "\"x\"", "7"]);
        let term = prop_oneof![3 => var.prop_map(String::from), 1 => cst.prop_map(String::from)];
        let pred = prop::sample::select(vec![("P", 1usize), ("Q", 1), ("R", 2), ("S", 0)]);
        let atom = (pred, prop::collection::vec(term, 2)).prop_map(|((p, n), ts)| {
            if n == 0 {
                p.to_string()
            } else {
                format!("{p}({})", ts[..n].join(", "))
            }
        });
        let rule = (
            prop::collection::vec(atom.clone(), 1..3),
            prop::collection::vec(atom.clone(), 0..2),
            prop::collection::vec(atom, 1..3),
            any::<bool>(),
        );
        prop::collection::vec(rule, 0..5).prop_map(|rules| {
            let mut out = String::new();
            for (i, (pos, neg, head, constraint)) in rules.into_iter().enumerate() {
                let mut body: Vec<String> = pos;
                body.extend(neg.into_iter().map(|a| format!("not {a}")));
                let head = if constraint { "bottom".to_string() } else { head.join(", ") };
                out.push_str(&format!("l{i}: {} -> {head}.\n", body.join(", ")));
            }
            out
        })
    }

    proptest! {
        // Arbitrary candidate programs; the ones that parse must survive print/parse.
        #[test]
        fn print_parse_round_trip(text in arb_program()) {
            if let Ok(doc) = parse_program(&text) {
                let printed = doc.to_string();
                let again = parse_program(&printed).unwrap();
                prop_assert_eq!(&doc, &again);
            }
        }

        #[test]
        fn parser_never_panics(text in "\\PC{0,80}") {
            let _ = parse_program(&text);
            let _ = parse_database(&text);
            let _ = parse_query(&text);
        }

        #[test]
        fn parser_never_panics_on_token_soup(
            toks in prop::collection::vec(
                prop::sample::select(vec!["P", "x", "a", "(", ")", ",", ".", ":", "->", "not", "exists",
                                          "bottom", "@", "priority", "weight", "=", "1", "-2", "?", "\"s\"", "%"]),
                0..30)
        ) {
            let text = toks.join(" ");
            let _ = parse_program(&text);
            let _ = parse_database(&text);
            let _ = parse_query(&text);
        }
    }
}
