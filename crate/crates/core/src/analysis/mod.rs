//! Reliance between rules and the syntactic classes built on it.

mod classes;
mod reliance;

pub use classes::{
    analyze, is_guarded, is_r_acyclic, predicate_stratify, r_stratify, validate_predicate_levels,
    validate_r_stratification, ClassReport,
};
pub use reliance::{negatively_relies, positively_relies, reliance_graph, RelianceGraph};
