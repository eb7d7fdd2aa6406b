use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, HashSet};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use fixedbitset::FixedBitSet;
use serde::Serialize;
use thiserror::Error;

use super::order::PreferenceOrder;
use crate::engine::{Engine, EngineConfig, EngineError};
use crate::exec;
use crate::model::{Database, Instance, Label, ModelError, PreferenceKind, PreferenceSpec, RuleSet};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("invalid preference: {0}")]
    Preference(#[from] ModelError),
    #[error("{found} rules to search over exceeds the limit of {limit} (raise --max-rules)")]
    TooManyRules { found: usize, limit: usize },
    #[error("repair search exceeded its time budget of {0:?}")]
    Timeout(Duration),
}

/// How preferred repairs are computed.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum SearchStrategy {
    /// The specialised search for the preference kind.
    #[default]
    Auto,
    /// ⪯-maxima of all ⊆-repairs.
    Reference,
}

#[derive(Clone, Debug)]
pub struct SearchConfig {
    pub engine: EngineConfig,
    /// Largest number of freely deletable rules a subset search accepts.
    pub max_rules: usize,
    /// Worker threads for consistency checks; 0 uses every core.
    pub jobs: usize,
    pub time_budget: Option<Duration>,
    pub strategy: SearchStrategy,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { engine: EngineConfig::default(), max_rules: 24, jobs: 0, time_budget: None, strategy: SearchStrategy::Auto }
    }
}

/// A preferred repair with one of its stable models.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Repair {
    #[serde(rename = "repair")]
    pub rules: Vec<Label>,
    pub witness: Instance,
    #[serde(skip)]
    pub mask: FixedBitSet,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepairSet {
    pub preference: PreferenceSpec,
    /// Sorted by label sequence.
    pub repairs: Vec<Repair>,
}

impl RepairSet {
    pub fn len(&self) -> usize {
        self.repairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.repairs.is_empty()
    }

    pub fn label_sets(&self) -> Vec<Vec<Label>> {
        self.repairs.iter().map(|r| r.rules.clone()).collect()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Repair> {
        self.repairs.iter()
    }
}

/// Memoized consistency checks for subsets of one rule set.
pub struct Searcher<'e> {
    engine: &'e Engine,
    cfg: SearchConfig,
    memo: Mutex<HashMap<FixedBitSet, bool>>,
    deadline: Option<Instant>,
    checks: AtomicUsize,
}

impl<'e> Searcher<'e> {
    pub fn new(engine: &'e Engine, cfg: SearchConfig) -> Searcher<'e> {
        let deadline = cfg.time_budget.map(|b| Instant::now() + b);
        Searcher { engine, cfg, memo: Mutex::new(HashMap::new()), deadline, checks: AtomicUsize::new(0) }
    }

    pub fn engine(&self) -> &Engine {
        self.engine
    }

    /// Number of consistency checks that reached the engine.
    pub fn checks(&self) -> usize {
        self.checks.load(Ordering::Relaxed)
    }

    pub fn is_consistent(&self, s: &FixedBitSet) -> Result<bool, SearchError> {
        if let Some(&v) = self.memo.lock().unwrap().get(s) {
            return Ok(v);
        }
        if let (Some(d), Some(b)) = (self.deadline, self.cfg.time_budget) {
            if Instant::now() >= d {
                return Err(SearchError::Timeout(b));
            }
        }
        self.checks.fetch_add(1, Ordering::Relaxed);
        let v = self.engine.is_consistent(s)?;
        self.memo.lock().unwrap().insert(s.clone(), v);
        Ok(v)
    }

    fn check_all(&self, sets: &[FixedBitSet]) -> Result<Vec<bool>, SearchError> {
        exec::map(sets, self.cfg.jobs, |s| self.is_consistent(s)).into_iter().collect()
    }

    fn n(&self) -> usize {
        self.engine.rules().len()
    }

    fn guard(&self, free: usize) -> Result<(), SearchError> {
        if free > self.cfg.max_rules {
            return Err(SearchError::TooManyRules { found: free, limit: self.cfg.max_rules });
        }
        Ok(())
    }

    /// The ⊆-maximal consistent sets among `fixed ∪ X` for `X ⊆ free`.
    ///
    /// Top-down by size. A set is examined only when all its one-larger
    /// supersets in the family were examined and found inconsistent, so every
    /// consistent set met is maximal; consistency need not be monotone. With
    /// `first_level_only` the search stops at the first size with a hit.
    fn maximal_consistent(&self, fixed: &FixedBitSet, free: &[usize], first_level_only: bool) -> Result<Vec<FixedBitSet>, SearchError> {
        self.guard(free.len())?;
        let mut top = fixed.clone();
        for &i in free {
            top.insert(i);
        }
        let mut frontier = vec![top];
        let mut found = Vec::new();
        while !frontier.is_empty() {
            let verdicts = self.check_all(&frontier)?;
            let mut dead: HashSet<FixedBitSet> = HashSet::new();
            for (s, ok) in frontier.into_iter().zip(verdicts) {
                if ok {
                    found.push(s);
                } else {
                    dead.insert(s);
                }
            }
            if first_level_only && !found.is_empty() {
                break;
            }
            let mut next: HashSet<FixedBitSet> = HashSet::new();
            for s in &dead {
                for &i in free.iter().filter(|&&i| s.contains(i)) {
                    let mut t = s.clone();
                    t.set(i, false);
                    if next.contains(&t) {
                        continue;
                    }
                    let covered = free.iter().filter(|&&j| !t.contains(j)).all(|&j| {
                        let mut u = t.clone();
                        u.insert(j);
                        dead.contains(&u)
                    });
                    if covered {
                        next.insert(t);
                    }
                }
            }
            frontier = next.into_iter().collect();
            frontier.sort_by(|a, b| a.as_slice().cmp(b.as_slice()));
        }
        Ok(found)
    }

    /// All ⊆-repairs.
    pub fn subset_repairs(&self) -> Result<Vec<FixedBitSet>, SearchError> {
        let all: Vec<usize> = (0..self.n()).collect();
        self.maximal_consistent(&FixedBitSet::with_capacity(self.n()), &all, false)
    }

    /// ⪯-repairs by the reference method: ⪯-maxima of the ⊆-repairs.
    pub fn reference_repairs(&self, order: &PreferenceOrder) -> Result<Vec<FixedBitSet>, SearchError> {
        Ok(order.maxima(&self.subset_repairs()?))
    }

    /// ⪯-repairs by the search specialised to the preference kind.
    pub fn fast_repairs(&self, order: &PreferenceOrder) -> Result<Vec<FixedBitSet>, SearchError> {
        match order.kind() {
            PreferenceKind::Subset => self.subset_repairs(),
            PreferenceKind::Cardinality => {
                let all: Vec<usize> = (0..self.n()).collect();
                self.maximal_consistent(&FixedBitSet::with_capacity(self.n()), &all, true)
            }
            PreferenceKind::PrioSubset | PreferenceKind::PrioCardinality => self.prioritized(order),
            PreferenceKind::Weight => self.weighted(order),
        }
    }

    /// Deletes only from a suffix of the priority levels, growing it upwards
    /// until some set keeping every earlier level whole is consistent. Any set
    /// missing a rule of a kept level is dominated by that consistent set, so
    /// the repairs are the ⪯-maxima of the ⊆-maximal sets found there.
    fn prioritized(&self, order: &PreferenceOrder) -> Result<Vec<FixedBitSet>, SearchError> {
        let n = self.n();
        for k in (0..order.num_levels()).rev() {
            let mut fixed = FixedBitSet::with_capacity(n);
            for i in 0..k {
                for r in order.level_members(i) {
                    fixed.insert(r);
                }
            }
            let free: Vec<usize> = (k..order.num_levels()).flat_map(|i| order.level_members(i)).collect();
            let found = self.maximal_consistent(&fixed, &free, false)?;
            if !found.is_empty() {
                log::debug!("prioritized search settled with levels {}.. deletable", k + 1);
                return Ok(order.maxima(&found));
            }
        }
        // no levels at all: only the empty rule set exists
        Ok(vec![FixedBitSet::with_capacity(n)])
    }

    /// Enumerates deletion sets by increasing deleted weight and returns every
    /// consistent complement at the first weight with one.
    fn weighted(&self, order: &PreferenceOrder) -> Result<Vec<FixedBitSet>, SearchError> {
        let n = self.n();
        let full = {
            let mut f = FixedBitSet::with_capacity(n);
            f.insert_range(..);
            f
        };
        if self.is_consistent(&full)? {
            return Ok(vec![full]);
        }
        let mut by_weight: Vec<usize> = (0..n).collect();
        by_weight.sort_by_key(|&r| (order.weight_of(r), r));
        let w = |k: usize| order.weight_of(by_weight[k]);
        // heap of (deleted weight, positions into by_weight); the successors of
        // a set whose last position is i add i+1, or move i to i+1
        let mut heap: BinaryHeap<Reverse<(i64, Vec<usize>)>> = BinaryHeap::new();
        if n > 0 {
            heap.push(Reverse((w(0), vec![0])));
        }
        let mut best: Option<i64> = None;
        let mut found = Vec::new();
        while let Some(Reverse((cost, pos))) = heap.pop() {
            if best.is_some_and(|b| cost > b) {
                break;
            }
            // gather every deletion set of this cost before checking them
            let mut batch = vec![pos];
            while let Some(Reverse((c, _))) = heap.peek() {
                if *c != cost {
                    break;
                }
                let Reverse((_, p)) = heap.pop().unwrap();
                batch.push(p);
            }
            for pos in &batch {
                let last = *pos.last().unwrap();
                if last + 1 < n {
                    let mut add = pos.clone();
                    add.push(last + 1);
                    heap.push(Reverse((cost + w(last + 1), add)));
                    let mut mv = pos.clone();
                    *mv.last_mut().unwrap() = last + 1;
                    heap.push(Reverse((cost - w(last) + w(last + 1), mv)));
                }
            }
            let sets: Vec<FixedBitSet> = batch
                .iter()
                .map(|pos| {
                    let mut s = full.clone();
                    for &k in pos {
                        s.set(by_weight[k], false);
                    }
                    s
                })
                .collect();
            for (s, ok) in sets.iter().zip(self.check_all(&sets)?) {
                if ok {
                    best = Some(cost);
                    found.push(s.clone());
                }
            }
        }
        Ok(found)
    }

    /// Preferred repairs with witnesses, sorted.
    pub fn repairs(&self, spec: &PreferenceSpec) -> Result<RepairSet, SearchError> {
        let order = PreferenceOrder::new(spec.clone(), self.engine.rules())?;
        let masks = match self.cfg.strategy {
            SearchStrategy::Auto => self.fast_repairs(&order)?,
            SearchStrategy::Reference => self.reference_repairs(&order)?,
        };
        self.with_witnesses(spec, masks)
    }

    fn with_witnesses(&self, spec: &PreferenceSpec, masks: Vec<FixedBitSet>) -> Result<RepairSet, SearchError> {
        let rules = self.engine.rules();
        let witnesses: Vec<Result<Option<Instance>, EngineError>> =
            exec::map(&masks, self.cfg.jobs, |m| self.engine.first_model(m));
        let mut repairs = Vec::with_capacity(masks.len());
        for (mask, w) in masks.into_iter().zip(witnesses) {
            let witness = w?.expect("repairs are consistent");
            repairs.push(Repair { rules: rules.labels_of(&mask), witness, mask });
        }
        repairs.sort_by(|a, b| a.rules.cmp(&b.rules));
        repairs.dedup_by(|a, b| a.rules == b.rules);
        Ok(RepairSet { preference: spec.clone(), repairs })
    }
}

/// All ⊆-repairs of `Σ` for `D`.
pub fn subset_repairs(db: &Database, rules: &RuleSet, cfg: &SearchConfig) -> Result<RepairSet, SearchError> {
    preferred_repairs(db, rules, &PreferenceSpec::subset(), cfg)
}

/// All ⪯-repairs of `Σ` for `D`.
pub fn preferred_repairs(db: &Database, rules: &RuleSet, pref: &PreferenceSpec, cfg: &SearchConfig) -> Result<RepairSet, SearchError> {
    pref.validate(rules)?;
    let engine = Engine::new(db.clone(), rules.clone(), cfg.engine.clone());
    Searcher::new(&engine, cfg.clone()).repairs(pref)
}
