use std::collections::BTreeSet;
use std::fmt;

use super::atom::Atom;
use super::error::ModelError;

/// A finite set of facts over constants only.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Database {
    facts: BTreeSet<Atom>,
}

impl Database {
    pub fn new(facts: impl IntoIterator<Item = Atom>) -> Result<Database, ModelError> {
        let mut set = BTreeSet::new();
        for f in facts {
            if f.is_falsum() {
                return Err(ModelError::FalsumInDatabase);
            }
            if f.has_skolem() {
                return Err(ModelError::NullInDatabase(f.to_string()));
            }
            if !f.is_ground() {
                return Err(ModelError::NonGroundFact(f.to_string()));
            }
            set.insert(f);
        }
        Ok(Database { facts: set })
    }

    pub fn facts(&self) -> &BTreeSet<Atom> {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.facts.iter()
    }

    pub fn to_instance(&self) -> Instance {
        Instance { atoms: self.facts.clone() }
    }
}

impl fmt::Display for Database {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in &self.facts {
            writeln!(f, "{a}.")?;
        }
        Ok(())
    }
}

/// A set of ground atoms; skolem terms (nulls) allowed.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Instance {
    atoms: BTreeSet<Atom>,
}

impl Instance {
    pub fn new(atoms: impl IntoIterator<Item = Atom>) -> Result<Instance, ModelError> {
        let mut set = BTreeSet::new();
        for a in atoms {
            if !a.is_ground() {
                return Err(ModelError::NonGroundAtom(a.to_string()));
            }
            set.insert(a);
        }
        Ok(Instance { atoms: set })
    }

    pub(crate) fn from_ground(atoms: BTreeSet<Atom>) -> Instance {
        Instance { atoms }
    }

    pub fn atoms(&self) -> &BTreeSet<Atom> {
        &self.atoms
    }

    pub fn contains(&self, a: &Atom) -> bool {
        self.atoms.contains(a)
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        f.write_str("}")
    }
}

impl serde::Serialize for Instance {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.atoms.iter())
    }
}
