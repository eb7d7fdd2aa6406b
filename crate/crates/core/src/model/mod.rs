//! Logical vocabulary: terms, atoms, rules, databases, instances, queries and
//! preferences. Every value is immutable once built, and constructors reject
//! inputs that break the invariants the rest of the crate relies on.

mod atom;
mod data;
mod error;
mod preference;
mod query;
mod rule;
mod subst;
mod term;

pub use atom::{Atom, Predicate, FALSUM};
pub use data::{Database, Instance};
pub use error::ModelError;
pub use preference::{PreferenceKind, PreferenceSpec};
pub(crate) use preference::validate_partition;
pub use query::Query;
pub use rule::{Rule, RuleSet};
pub use subst::{apply_all, apply_substitution, apply_term, match_atom, Substitution};
pub use term::{is_variable_name, Label, Name, SkolemFn, SkolemTerm, Term};
pub(crate) use term::{is_identifier, KEYWORDS};
