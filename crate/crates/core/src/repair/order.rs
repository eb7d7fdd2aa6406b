use std::cmp::Ordering;

use fixedbitset::FixedBitSet;
use serde::Serialize;

use crate::model::{Label, ModelError, PreferenceKind, PreferenceSpec, RuleSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// `S ≺ S′`
    Less,
    /// `S′ ≺ S`
    Greater,
    Equivalent,
    Incomparable,
}

/// One of the five preorders, bound to a rule set.
#[derive(Clone, Debug)]
pub struct PreferenceOrder {
    spec: PreferenceSpec,
    /// Priority level of each rule index, for the prioritized kinds.
    level: Vec<usize>,
    levels: usize,
    weight: Vec<i64>,
}

impl PreferenceOrder {
    pub fn new(spec: PreferenceSpec, rules: &RuleSet) -> Result<PreferenceOrder, ModelError> {
        spec.validate(rules)?;
        let mut level = vec![0; rules.len()];
        for (i, block) in spec.prioritization.iter().enumerate() {
            for l in block {
                level[rules.index_of(l).expect("validated")] = i;
            }
        }
        let weight = if spec.kind == PreferenceKind::Weight {
            rules.labels().iter().map(|l| spec.weights[l]).collect()
        } else {
            vec![1; rules.len()]
        };
        let levels = spec.prioritization.len();
        Ok(PreferenceOrder { spec, level, levels, weight })
    }

    pub fn spec(&self) -> &PreferenceSpec {
        &self.spec
    }

    pub fn kind(&self) -> PreferenceKind {
        self.spec.kind
    }

    pub fn num_levels(&self) -> usize {
        self.levels
    }

    /// Rule indices of priority level `i`, in index order.
    pub fn level_members(&self, i: usize) -> Vec<usize> {
        (0..self.level.len()).filter(|&r| self.level[r] == i).collect()
    }

    pub fn weight_of(&self, rule: usize) -> i64 {
        self.weight[rule]
    }

    pub fn total_weight(&self, s: &FixedBitSet) -> i64 {
        s.ones().map(|r| self.weight[r]).sum()
    }

    fn level_set(&self, s: &FixedBitSet, i: usize) -> FixedBitSet {
        let mut out = FixedBitSet::with_capacity(self.level.len());
        for r in s.ones().filter(|&r| self.level[r] == i) {
            out.insert(r);
        }
        out
    }

    /// `S ⪯ S′`.
    pub fn leq(&self, s: &FixedBitSet, t: &FixedBitSet) -> bool {
        match self.spec.kind {
            PreferenceKind::Subset => s.is_subset(t),
            PreferenceKind::Cardinality => s.count_ones(..) <= t.count_ones(..),
            PreferenceKind::Weight => self.total_weight(s) <= self.total_weight(t),
            PreferenceKind::PrioSubset => {
                for i in 0..self.levels {
                    let (a, b) = (self.level_set(s, i), self.level_set(t, i));
                    if a != b {
                        return a.is_subset(&b);
                    }
                }
                true
            }
            PreferenceKind::PrioCardinality => {
                for i in 0..self.levels {
                    let (a, b) = (self.level_set(s, i).count_ones(..), self.level_set(t, i).count_ones(..));
                    match a.cmp(&b) {
                        Ordering::Equal => continue,
                        o => return o == Ordering::Less,
                    }
                }
                true
            }
        }
    }

    pub fn compare(&self, s: &FixedBitSet, t: &FixedBitSet) -> Comparison {
        match (self.leq(s, t), self.leq(t, s)) {
            (true, true) => Comparison::Equivalent,
            (true, false) => Comparison::Less,
            (false, true) => Comparison::Greater,
            (false, false) => Comparison::Incomparable,
        }
    }

    /// `S ≺ S′`.
    pub fn less(&self, s: &FixedBitSet, t: &FixedBitSet) -> bool {
        self.leq(s, t) && !self.leq(t, s)
    }

    /// Members of `sets` that no other member strictly dominates.
    pub fn maxima(&self, sets: &[FixedBitSet]) -> Vec<FixedBitSet> {
        sets.iter().filter(|s| !sets.iter().any(|t| self.less(s, t))).cloned().collect()
    }
}

/// Compares two label sets of `rules` under `spec`.
pub fn compare(rules: &RuleSet, spec: &PreferenceSpec, s: &[Label], t: &[Label]) -> Result<Comparison, ModelError> {
    let order = PreferenceOrder::new(spec.clone(), rules)?;
    Ok(order.compare(&rules.mask_of(s)?, &rules.mask_of(t)?))
}
