use std::fmt;
use std::sync::Arc;

use super::term::{Name, Term};

/// Name reserved for the 0-ary falsum predicate.
pub const FALSUM: &str = "⊥";

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Predicate {
    pub name: Name,
    pub arity: usize,
}

impl Predicate {
    pub fn new(name: impl AsRef<str>, arity: usize) -> Self {
        Predicate { name: Arc::from(name.as_ref()), arity }
    }

    pub fn falsum() -> Self {
        Predicate::new(FALSUM, 0)
    }

    pub fn is_falsum(&self) -> bool {
        self.arity == 0 && &*self.name == FALSUM
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_falsum() {
            f.write_str("bottom")
        } else {
            write!(f, "{}/{}", self.name, self.arity)
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Atom {
    pub pred: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    /// Builds an atom; the predicate's arity is taken from `args`.
    pub fn new(pred: impl AsRef<str>, args: Vec<Term>) -> Self {
        Atom { pred: Predicate::new(pred, args.len()), args }
    }

    pub fn falsum() -> Self {
        Atom { pred: Predicate::falsum(), args: Vec::new() }
    }

    pub fn is_falsum(&self) -> bool {
        self.pred.is_falsum()
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn has_skolem(&self) -> bool {
        self.args.iter().any(Term::has_skolem)
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        self.collect_vars(&mut out);
        out
    }

    pub fn collect_vars(&self, out: &mut Vec<Name>) {
        for t in &self.args {
            t.collect_vars(out);
        }
    }

    pub fn collect_constants(&self, out: &mut Vec<Name>) {
        for t in &self.args {
            t.collect_constants(out);
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_falsum() {
            return f.write_str("bottom");
        }
        f.write_str(&self.pred.name)?;
        if !self.args.is_empty() {
            f.write_str("(")?;
            for (i, a) in self.args.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// Atoms serialize as their surface syntax.
impl serde::Serialize for Atom {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

