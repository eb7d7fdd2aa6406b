use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::error::ModelError;
use super::rule::RuleSet;
use super::term::Label;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PreferenceKind {
    /// Set inclusion.
    Subset,
    /// Number of rules.
    #[serde(rename = "card")]
    Cardinality,
    /// Level-lexicographic inclusion under a prioritization.
    PrioSubset,
    /// Level-lexicographic cardinality under a prioritization.
    #[serde(rename = "prio-card")]
    PrioCardinality,
    /// Total rule weight.
    Weight,
}

impl PreferenceKind {
    pub const ALL: [PreferenceKind; 5] = [
        PreferenceKind::Subset,
        PreferenceKind::Cardinality,
        PreferenceKind::PrioSubset,
        PreferenceKind::PrioCardinality,
        PreferenceKind::Weight,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PreferenceKind::Subset => "subset",
            PreferenceKind::Cardinality => "card",
            PreferenceKind::PrioSubset => "prio-subset",
            PreferenceKind::PrioCardinality => "prio-card",
            PreferenceKind::Weight => "weight",
        }
    }

    pub fn needs_prioritization(self) -> bool {
        matches!(self, PreferenceKind::PrioSubset | PreferenceKind::PrioCardinality)
    }
}

impl fmt::Display for PreferenceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PreferenceKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PreferenceKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown preference `{s}` (expected subset, card, prio-subset, prio-card or weight)"))
    }
}

/// One of the five preorders together with its parameters.
#[derive(Clone, PartialEq, Eq, Debug, Serialize, Deserialize)]
pub struct PreferenceSpec {
    pub kind: PreferenceKind,
    /// `P1, …, Pn`, most reliable level first.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prioritization: Vec<Vec<Label>>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub weights: BTreeMap<Label, i64>,
}

impl PreferenceSpec {
    pub fn new(kind: PreferenceKind) -> Self {
        PreferenceSpec { kind, prioritization: Vec::new(), weights: BTreeMap::new() }
    }

    pub fn subset() -> Self {
        PreferenceSpec::new(PreferenceKind::Subset)
    }

    pub fn cardinality() -> Self {
        PreferenceSpec::new(PreferenceKind::Cardinality)
    }

    pub fn prioritized(kind: PreferenceKind, levels: Vec<Vec<Label>>) -> Self {
        PreferenceSpec { kind, prioritization: levels, weights: BTreeMap::new() }
    }

    pub fn weighted(weights: BTreeMap<Label, i64>) -> Self {
        PreferenceSpec { kind: PreferenceKind::Weight, prioritization: Vec::new(), weights }
    }

    /// Checks the parameters the kind needs against `rules`: the levels must
    /// partition the labels, and every rule needs a weight of at least 1.
    pub fn validate(&self, rules: &RuleSet) -> Result<(), ModelError> {
        if self.kind.needs_prioritization() {
            if self.prioritization.is_empty() && !rules.is_empty() {
                return Err(ModelError::MissingPrioritization(self.kind.to_string()));
            }
            validate_partition(&self.prioritization, rules)?;
        }
        if self.kind == PreferenceKind::Weight {
            for (l, &w) in &self.weights {
                if rules.get(l).is_none() {
                    return Err(ModelError::UnknownLabel(l.clone()));
                }
                if w < 1 {
                    return Err(ModelError::InvalidWeight { label: l.clone(), weight: w });
                }
            }
            if let Some(r) = rules.iter().find(|r| !self.weights.contains_key(r.label())) {
                return Err(ModelError::MissingWeight(r.label().clone()));
            }
        }
        Ok(())
    }
}

pub(crate) fn validate_partition(levels: &[Vec<Label>], rules: &RuleSet) -> Result<(), ModelError> {
    let mut seen = BTreeSet::new();
    for level in levels {
        if level.is_empty() {
            return Err(ModelError::NotAPartition("empty priority level".into()));
        }
        for l in level {
            if rules.get(l).is_none() {
                return Err(ModelError::UnknownLabel(l.clone()));
            }
            if !seen.insert(l.clone()) {
                return Err(ModelError::NotAPartition(format!("rule {l} appears in more than one level")));
            }
        }
    }
    if let Some(r) = rules.iter().find(|r| !seen.contains(r.label())) {
        return Err(ModelError::NotAPartition(format!("rule {} is not assigned a level", r.label())));
    }
    Ok(())
}
