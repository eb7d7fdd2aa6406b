use thiserror::Error;

use super::term::Label;

/// Violations of the vocabulary invariants, reported at construction time.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("rule {rule}: variable `{var}` does not occur in a positive body atom")]
    UnsafeVariable { rule: Label, var: String },
    #[error("rule {rule}: existential variable `{var}` occurs in the body")]
    ExistentialInBody { rule: Label, var: String },
    #[error("rule {rule}: existential variable `{var}` does not occur in the head")]
    UnusedExistential { rule: Label, var: String },
    #[error("rule {rule}: `bottom` must be the only head atom and cannot appear in a body")]
    MisplacedFalsum { rule: Label },
    #[error("rule {rule}: head must not be empty")]
    EmptyHead { rule: Label },
    #[error("rule {rule}: function terms are not allowed in rules")]
    FunctionTermInRule { rule: Label },
    #[error("duplicate rule label `{0}`")]
    DuplicateLabel(Label),
    #[error("unknown rule label `{0}`")]
    UnknownLabel(Label),
    #[error("weight of rule {label} must be a positive integer, got {weight}")]
    InvalidWeight { label: Label, weight: i64 },
    #[error("no weight given for rule {0}")]
    MissingWeight(Label),
    #[error("priority levels do not partition the rule set: {0}")]
    NotAPartition(String),
    #[error("preference `{0}` requires a prioritization")]
    MissingPrioritization(String),
    #[error("fact `{0}` is not ground")]
    NonGroundFact(String),
    #[error("fact `{0}` contains a null or function term")]
    NullInDatabase(String),
    #[error("`bottom` cannot be asserted as a fact")]
    FalsumInDatabase,
    #[error("atom `{0}` is not ground")]
    NonGroundAtom(String),
    #[error("query atom `{0}` contains a null or function term")]
    NullInQuery(String),
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
}
