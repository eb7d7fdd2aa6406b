use std::fmt;

use super::atom::Atom;
use super::error::ModelError;
use super::term::Name;

/// A normal Boolean conjunctive query: `∃vars. Q⁺ ∧ ¬Q⁻`.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Query {
    pos: Vec<Atom>,
    neg: Vec<Atom>,
}

impl Query {
    pub fn new(pos: Vec<Atom>, neg: Vec<Atom>) -> Result<Query, ModelError> {
        if let Some(a) = pos.iter().chain(&neg).find(|a| a.has_skolem() || a.is_falsum()) {
            return Err(ModelError::NullInQuery(a.to_string()));
        }
        Ok(Query { pos, neg })
    }

    pub fn pos(&self) -> &[Atom] {
        &self.pos
    }

    pub fn neg(&self) -> &[Atom] {
        &self.neg
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for a in self.pos.iter().chain(&self.neg) {
            a.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("?")?;
        let mut first = true;
        for (neg, a) in self.pos.iter().map(|a| (false, a)).chain(self.neg.iter().map(|a| (true, a))) {
            f.write_str(if first { " " } else { ", " })?;
            first = false;
            if neg {
                f.write_str("not ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}
