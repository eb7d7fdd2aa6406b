//! Skolemization, relevant grounding and stable models.
//!
//! A rule set is skolemized, grounded once against the database over the
//! positive closure (negation ignored), and then every subset of the rules is
//! evaluated on that grounding by switching rule instances on or off.

mod ground;
mod skolem;
mod solve;

use std::time::Duration;

use thiserror::Error;

pub use ground::{ground_relevant, AtomId, GroundProgram, GroundRule};
pub use skolem::{skolemize, skolemize_rule, SkolemRule};
pub use solve::{first_stable_model, gl_reduct, is_consistent, least_model, stable_models, Engine};

use crate::bridge::{BridgeError, SolverConfig};

/// Where stable models come from.
#[derive(Clone, Debug, Default)]
pub enum Backend {
    #[default]
    Native,
    External(SolverConfig),
}

/// How the native backend looks for models.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Strategy {
    /// Stratified evaluation when the active rules admit predicate levels,
    /// branching otherwise.
    #[default]
    Auto,
    /// Stratified evaluation only; fails on unstratified rule sets.
    Stratified,
    /// Branch over the truth of negated atoms.
    Branching,
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    pub max_skolem_depth: usize,
    pub max_ground_atoms: usize,
    /// Most negated atoms the branching search will guess over.
    pub max_neg_branch: usize,
    pub backend: Backend,
    pub strategy: Strategy,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            max_skolem_depth: 8,
            max_ground_atoms: 1_000_000,
            max_neg_branch: 20,
            backend: Backend::Native,
            strategy: Strategy::Auto,
        }
    }
}

impl EngineConfig {
    pub fn with_external(solver: SolverConfig) -> Self {
        EngineConfig { backend: Backend::External(solver), ..Self::default() }
    }

    pub fn solver_timeout(&self) -> Option<Duration> {
        match &self.backend {
            Backend::External(s) => Some(s.timeout),
            Backend::Native => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error(
        "skolem term {term} produced by rule {rule} exceeds depth {depth}; \
         the rule set is probably not R-acyclic (raise --max-depth if it is)"
    )]
    DepthLimitExceeded { term: String, rule: String, depth: usize },
    #[error("grounding exceeded {0} atoms")]
    AtomCapExceeded(usize),
    #[error(
        "{found} negated atoms are undetermined, more than the branching limit {limit}; \
         use the external backend or raise --max-neg-branch"
    )]
    NegBranchExceeded { found: usize, limit: usize },
    #[error("the active rules are not stratified")]
    NotStratified,
    #[error(transparent)]
    Bridge(#[from] BridgeError),
}
