//! Independent oracles shared by the integration tests and the acceptance
//! harness. None of this reuses the crate's search or order code.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use repairqa::engine::{stable_models, EngineConfig};
use repairqa::model::{Atom, Database, Instance, Label, PreferenceKind, PreferenceSpec, Query, Rule, RuleSet};
use repairqa::query::holds_in_model;

pub const EX1_RULES: &str = include_str!("../../../../data/ex1.rules");
pub const EX1_FACTS: &str = include_str!("../../../../data/ex1.facts");

pub fn labels(names: &[&str]) -> Vec<Label> {
    names.iter().map(Label::new).collect()
}

// ---------------------------------------------------------------------------
// preorders over label sets, written straight from their definitions

pub fn leq(spec: &PreferenceSpec, s: &BTreeSet<Label>, t: &BTreeSet<Label>) -> bool {
    let restrict = |x: &BTreeSet<Label>, level: &Vec<Label>| -> BTreeSet<Label> {
        x.iter().filter(|l| level.contains(l)).cloned().collect()
    };
    match spec.kind {
        PreferenceKind::Subset => s.is_subset(t),
        PreferenceKind::Cardinality => s.len() <= t.len(),
        PreferenceKind::Weight => {
            let w = |x: &BTreeSet<Label>| x.iter().map(|l| spec.weights[l]).sum::<i64>();
            w(s) <= w(t)
        }
        PreferenceKind::PrioSubset => {
            let levels = &spec.prioritization;
            let all_equal = levels.iter().all(|p| restrict(s, p) == restrict(t, p));
            all_equal
                || (0..levels.len()).any(|i| {
                    let (a, b) = (restrict(s, &levels[i]), restrict(t, &levels[i]));
                    a.is_subset(&b) && a != b && (0..i).all(|j| restrict(s, &levels[j]) == restrict(t, &levels[j]))
                })
        }
        PreferenceKind::PrioCardinality => {
            let levels = &spec.prioritization;
            let n = |x: &BTreeSet<Label>, i: usize| restrict(x, &levels[i]).len();
            (0..levels.len()).all(|i| n(s, i) == n(t, i))
                || (0..levels.len()).any(|i| n(s, i) < n(t, i) && (0..i).all(|j| n(s, j) == n(t, j)))
        }
    }
}

pub fn strictly_less(spec: &PreferenceSpec, s: &BTreeSet<Label>, t: &BTreeSet<Label>) -> bool {
    leq(spec, s, t) && !leq(spec, t, s)
}

// ---------------------------------------------------------------------------
// the reference procedure: every subset against every subset

pub fn all_subsets(rules: &RuleSet) -> Vec<BTreeSet<Label>> {
    let ls = rules.labels();
    (0u32..1 << ls.len())
        .map(|bits| ls.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, l)| l.clone()).collect())
        .collect()
}

pub fn restrict(rules: &RuleSet, s: &BTreeSet<Label>) -> RuleSet {
    RuleSet::new(rules.iter().filter(|r| s.contains(r.label())).cloned().collect()).unwrap()
}

/// Stable models of `D ∪ S`, grounding `S` on its own.
pub fn models_of(db: &Database, rules: &RuleSet, s: &BTreeSet<Label>) -> Vec<Instance> {
    stable_models(db, &restrict(rules, s), &EngineConfig::default()).unwrap()
}

/// Preferred repairs by the double loop, and the query verdict the same
/// procedure returns.
pub fn literal_prqa(db: &Database, rules: &RuleSet, spec: &PreferenceSpec, q: &Query) -> (BTreeSet<BTreeSet<Label>>, bool) {
    let subsets = all_subsets(rules);
    let consistent: BTreeMap<BTreeSet<Label>, Vec<Instance>> = subsets
        .iter()
        .map(|s| (s.clone(), models_of(db, rules, s)))
        .filter(|(_, ms)| !ms.is_empty())
        .collect();
    let mut repairs = BTreeSet::new();
    let mut verdict = true;
    for (s, models) in &consistent {
        let is_repair = !subsets.iter().any(|t| strictly_less(spec, s, t) && consistent.contains_key(t));
        if is_repair {
            repairs.insert(s.clone());
            if !models.iter().all(|m| holds_in_model(m, q).unwrap()) {
                verdict = false;
            }
        }
    }
    (repairs, verdict)
}

// ---------------------------------------------------------------------------
// propositional programs and their stable models by brute force

#[derive(Clone, Debug)]
pub struct PropRule {
    pub head: Option<usize>,
    pub pos: Vec<usize>,
    pub neg: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct PropProgram {
    pub atoms: usize,
    pub facts: Vec<usize>,
    pub rules: Vec<PropRule>,
}

pub fn prop_atom(i: usize) -> Atom {
    Atom::new(format!("p{i}"), vec![])
}

impl PropProgram {
    pub fn random<R: Rng>(rng: &mut R) -> PropProgram {
        let atoms = rng.gen_range(1..=12);
        let n_rules = rng.gen_range(1..=10);
        let facts = (0..atoms).filter(|_| rng.gen_bool(0.2)).collect();
        let rules = (0..n_rules)
            .map(|_| {
                let head = if rng.gen_bool(0.15) { None } else { Some(rng.gen_range(0..atoms)) };
                let pos = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..atoms)).collect();
                let neg = (0..rng.gen_range(0..=2)).map(|_| rng.gen_range(0..atoms)).collect();
                PropRule { head, pos, neg }
            })
            .collect();
        PropProgram { atoms, facts, rules }
    }

    pub fn database(&self) -> Database {
        Database::new(self.facts.iter().map(|&i| prop_atom(i))).unwrap()
    }

    pub fn rule_set(&self) -> RuleSet {
        let rules = self
            .rules
            .iter()
            .enumerate()
            .map(|(k, r)| {
                let label = Label::new(format!("r{}", k + 1));
                let pos = r.pos.iter().map(|&i| prop_atom(i)).collect();
                let neg = r.neg.iter().map(|&i| prop_atom(i)).collect();
                match r.head {
                    Some(h) => Rule::new(label, pos, neg, vec![prop_atom(h)], vec![]),
                    None => Rule::constraint(label, pos, neg),
                }
                .unwrap()
            })
            .collect();
        RuleSet::new(rules).unwrap()
    }

    /// Least model of the reduct w.r.t. `m`, as a bit mask; bit `atoms` is ⊥.
    fn reduct_least_model(&self, m: u32) -> u32 {
        let bottom = 1u32 << self.atoms;
        let mut lm: u32 = self.facts.iter().fold(0, |acc, &i| acc | 1 << i);
        loop {
            let mut next = lm;
            for r in &self.rules {
                if r.neg.iter().any(|&i| m >> i & 1 == 1) {
                    continue;
                }
                if r.pos.iter().all(|&i| lm >> i & 1 == 1) {
                    next |= r.head.map_or(bottom, |h| 1 << h);
                }
            }
            if next == lm {
                return lm;
            }
            lm = next;
        }
    }

    /// Every `M` with `M = lfp(reduct(M))` and no ⊥, checked over all subsets.
    pub fn brute_force_models(&self) -> BTreeSet<Instance> {
        (0u32..1 << self.atoms)
            .filter(|&m| self.reduct_least_model(m) == m)
            .map(|m| Instance::new((0..self.atoms).filter(|i| m >> i & 1 == 1).map(prop_atom)).unwrap())
            .collect()
    }
}
