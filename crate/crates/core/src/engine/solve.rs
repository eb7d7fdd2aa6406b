use std::collections::BTreeMap;

use fixedbitset::FixedBitSet;

use super::ground::{ground_masked, AtomId, GroundProgram, GroundRule};
use super::{skolemize, Backend, EngineConfig, EngineError, SkolemRule, Strategy};
use crate::analysis::predicate_stratify;
use crate::bridge::{emit_asp, solve_external, SolverConfig};
use crate::model::{Database, Instance, Predicate, RuleSet};

/// Counter-based forward chaining over a fixed grounding: each rule instance
/// keeps the number of positive body atoms still missing.
struct Saturator {
    need: Vec<u32>,
    pos_occ: Vec<Vec<u32>>,
    by_source: Vec<Vec<u32>>,
    base: FixedBitSet,
}

impl Saturator {
    fn new(g: &GroundProgram, sources: usize) -> Saturator {
        let mut pos_occ = vec![Vec::new(); g.num_atoms()];
        let mut by_source = vec![Vec::new(); sources];
        let mut need = Vec::with_capacity(g.rules().len());
        for (i, r) in g.rules().iter().enumerate() {
            for &a in &r.pos {
                pos_occ[a as usize].push(i as u32);
            }
            need.push(r.pos.len() as u32);
            by_source[r.source].push(i as u32);
        }
        let mut base = FixedBitSet::with_capacity(g.num_atoms());
        for &b in g.base_facts() {
            base.insert(b as usize);
        }
        Saturator { need, pos_occ, by_source, base }
    }

    fn active_rules(&self, n_rules: usize, mask: &FixedBitSet) -> FixedBitSet {
        let mut act = FixedBitSet::with_capacity(n_rules);
        for s in mask.ones() {
            if let Some(rs) = self.by_source.get(s) {
                for &r in rs {
                    act.insert(r as usize);
                }
            }
        }
        act
    }

    /// Least model of the active instances that `allow` keeps, negation
    /// stripped.
    fn saturate(&self, g: &GroundProgram, active: &FixedBitSet, allow: impl Fn(&GroundRule) -> bool) -> FixedBitSet {
        let rules = g.rules();
        let mut count = self.need.clone();
        let mut model = self.base.clone();
        let mut queue: Vec<u32> = self.base.ones().map(|i| i as u32).collect();
        for r in active.ones() {
            let gr = &rules[r];
            if gr.pos.is_empty() && allow(gr) && !model.put(gr.head as usize) {
                queue.push(gr.head);
            }
        }
        while let Some(a) = queue.pop() {
            for &r in &self.pos_occ[a as usize] {
                let r = r as usize;
                count[r] -= 1;
                if count[r] == 0 && active.contains(r) {
                    let gr = &rules[r];
                    if allow(gr) && !model.put(gr.head as usize) {
                        queue.push(gr.head);
                    }
                }
            }
        }
        model
    }

    /// The candidate model of a stratified program, built stratum by stratum.
    fn stratified(&self, g: &GroundProgram, active: &FixedBitSet, stratum: &[usize]) -> FixedBitSet {
        let rules = g.rules();
        let mut by_level: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for r in active.ones() {
            by_level.entry(stratum[r]).or_default().push(r);
        }
        let mut count = self.need.clone();
        let mut model = self.base.clone();
        let mut queue: Vec<u32> = self.base.ones().map(|i| i as u32).collect();
        let neg_ok = |gr: &GroundRule, m: &FixedBitSet| gr.neg.iter().all(|&n| !m.contains(n as usize));
        let drain = |queue: &mut Vec<u32>, model: &mut FixedBitSet, count: &mut Vec<u32>, level: Option<usize>| {
            while let Some(a) = queue.pop() {
                for &r in &self.pos_occ[a as usize] {
                    let r = r as usize;
                    count[r] -= 1;
                    if count[r] == 0 && active.contains(r) && level.is_some_and(|l| stratum[r] <= l) {
                        let gr = &rules[r];
                        if neg_ok(gr, model) && !model.put(gr.head as usize) {
                            queue.push(gr.head);
                        }
                    }
                }
            }
        };
        drain(&mut queue, &mut model, &mut count, None);
        for (&level, rs) in &by_level {
            for &r in rs {
                let gr = &rules[r];
                if count[r] == 0 && neg_ok(gr, &model) && !model.put(gr.head as usize) {
                    queue.push(gr.head);
                }
            }
            drain(&mut queue, &mut model, &mut count, Some(level));
        }
        model
    }
}

struct Prepared {
    ground: GroundProgram,
    sat: Saturator,
}

impl Prepared {
    fn new(ground: GroundProgram, sources: usize) -> Prepared {
        let sat = Saturator::new(&ground, sources);
        Prepared { ground, sat }
    }
}

/// Stable-model reasoning for one database and every subset of one rule set.
///
/// The full rule set is grounded once; a subset is evaluated by switching off
/// the instances of the other rules. If the full grounding hits a limit, each
/// subset is grounded on its own instead.
pub struct Engine {
    db: Database,
    rules: RuleSet,
    skolem: Vec<SkolemRule>,
    cfg: EngineConfig,
    full: Option<Result<Prepared, EngineError>>,
    full_levels: Option<BTreeMap<Predicate, usize>>,
}

impl Engine {
    pub fn new(db: Database, rules: RuleSet, cfg: EngineConfig) -> Engine {
        let skolem = skolemize(&rules);
        let full = match cfg.backend {
            Backend::Native => {
                let g = ground_masked(&skolem, &db, &cfg, None);
                if let Err(e) = &g {
                    log::info!("full grounding failed ({e}); grounding subsets separately");
                }
                Some(g.map(|g| Prepared::new(g, rules.len())))
            }
            Backend::External(_) => None,
        };
        let full_levels = predicate_stratify(&rules);
        Engine { db, rules, skolem, cfg, full, full_levels }
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    pub fn database(&self) -> &Database {
        &self.db
    }

    pub fn config(&self) -> &EngineConfig {
        &self.cfg
    }

    /// The grounding of the full rule set, when it succeeded.
    pub fn grounding(&self) -> Option<&GroundProgram> {
        match &self.full {
            Some(Ok(p)) => Some(&p.ground),
            _ => None,
        }
    }

    /// Stable models of `D ∪ S` for the rules in `mask`, sorted; `limit == 0`
    /// asks for all of them.
    pub fn stable_models(&self, mask: &FixedBitSet, limit: usize) -> Result<Vec<Instance>, EngineError> {
        match &self.cfg.backend {
            Backend::Native => self.native(mask, limit),
            Backend::External(sc) => {
                let chosen: Vec<SkolemRule> = mask.ones().filter_map(|i| self.skolem.get(i).cloned()).collect();
                let program = emit_asp(&self.db, &chosen)?;
                let sc = SolverConfig { model_limit: limit, ..sc.clone() };
                let mut models = solve_external(&program, &sc)?;
                models.retain(|m| !m.iter().any(|a| a.is_falsum()));
                models.sort();
                models.dedup();
                Ok(models)
            }
        }
    }

    pub fn is_consistent(&self, mask: &FixedBitSet) -> Result<bool, EngineError> {
        Ok(!self.stable_models(mask, 1)?.is_empty())
    }

    pub fn first_model(&self, mask: &FixedBitSet) -> Result<Option<Instance>, EngineError> {
        Ok(self.stable_models(mask, 1)?.into_iter().next())
    }

    fn native(&self, mask: &FixedBitSet, limit: usize) -> Result<Vec<Instance>, EngineError> {
        let local;
        let p = match &self.full {
            Some(Ok(p)) => p,
            _ => {
                local = Prepared::new(ground_masked(&self.skolem, &self.db, &self.cfg, Some(mask))?, self.rules.len());
                &local
            }
        };
        let g = &p.ground;
        let active = p.sat.active_rules(g.rules().len(), mask);
        let levels = match self.cfg.strategy {
            Strategy::Branching => None,
            _ => match &self.full_levels {
                Some(l) => Some(l.clone()),
                None => predicate_stratify(&self.rules.restrict(mask)),
            },
        };
        if self.cfg.strategy == Strategy::Stratified && levels.is_none() {
            return Err(EngineError::NotStratified);
        }
        let masks = match levels {
            Some(levels) => {
                let stratum: Vec<usize> = g
                    .rules()
                    .iter()
                    .map(|r| levels.get(&g.atom(r.head).pred).copied().unwrap_or(0))
                    .collect();
                let m = p.sat.stratified(g, &active, &stratum);
                let check = p.sat.saturate(g, &active, |r| r.neg.iter().all(|&n| !m.contains(n as usize)));
                debug_assert_eq!(m, check, "stratified candidate is not a fixpoint of its reduct");
                if m != check || contains_falsum(g, &m) {
                    Vec::new()
                } else {
                    vec![m]
                }
            }
            None => branching(p, &active, limit, self.cfg.max_neg_branch)?,
        };
        let mut out: Vec<Instance> = masks.iter().map(|m| g.instance(m, false)).collect();
        out.sort();
        Ok(out)
    }
}

fn contains_falsum(g: &GroundProgram, m: &FixedBitSet) -> bool {
    g.falsum().is_some_and(|f| m.contains(f as usize))
}

/// Guesses the truth of every undetermined negated atom and keeps the guesses
/// that the least model of the reduct reproduces.
fn branching(p: &Prepared, active: &FixedBitSet, limit: usize, max_branch: usize) -> Result<Vec<FixedBitSet>, EngineError> {
    let g = &p.ground;
    let closure = p.sat.saturate(g, active, |_| true);
    let mut free: Vec<AtomId> = active.ones().flat_map(|r| g.rules()[r].neg.iter().copied()).collect();
    free.sort_unstable();
    free.dedup();
    free.retain(|&a| closure.contains(a as usize) && !p.sat.base.contains(a as usize));
    if free.len() > max_branch {
        return Err(EngineError::NegBranchExceeded { found: free.len(), limit: max_branch });
    }
    let mut out = Vec::new();
    for bits in 0u64..(1u64 << free.len()) {
        let mut assumed = p.sat.base.clone();
        for (i, &a) in free.iter().enumerate() {
            if bits >> i & 1 == 1 {
                assumed.insert(a as usize);
            }
        }
        let m = p.sat.saturate(g, active, |r| r.neg.iter().all(|&n| !assumed.contains(n as usize)));
        let agrees = free.iter().enumerate().all(|(i, &a)| m.contains(a as usize) == (bits >> i & 1 == 1));
        if agrees && !contains_falsum(g, &m) {
            out.push(m);
            if limit > 0 && out.len() >= limit {
                break;
            }
        }
    }
    Ok(out)
}

/// All stable models of `D ∪ S`, sorted.
pub fn stable_models(db: &Database, rules: &RuleSet, cfg: &EngineConfig) -> Result<Vec<Instance>, EngineError> {
    let e = Engine::new(db.clone(), rules.clone(), cfg.clone());
    e.stable_models(&rules.full_mask(), 0)
}

/// Whether `D ∪ S` has at least one stable model.
pub fn is_consistent(db: &Database, rules: &RuleSet, cfg: &EngineConfig) -> Result<bool, EngineError> {
    let e = Engine::new(db.clone(), rules.clone(), cfg.clone());
    e.is_consistent(&rules.full_mask())
}

pub fn first_stable_model(db: &Database, rules: &RuleSet, cfg: &EngineConfig) -> Result<Option<Instance>, EngineError> {
    let e = Engine::new(db.clone(), rules.clone(), cfg.clone());
    e.first_model(&rules.full_mask())
}

/// The Gelfond–Lifschitz reduct: drop instances whose negative body meets
/// `m`, then strip the remaining negative bodies.
pub fn gl_reduct(g: &GroundProgram, m: &Instance) -> Vec<GroundRule> {
    let mask = g.mask(m);
    g.rules()
        .iter()
        .filter(|r| r.neg.iter().all(|&n| !mask.contains(n as usize)))
        .map(|r| GroundRule { neg: Vec::new(), ..r.clone() })
        .collect()
}

/// Least model of a negation-free set of instances over `g`'s base facts,
/// by naive iteration of the immediate-consequence operator.
pub fn least_model(g: &GroundProgram, rules: &[GroundRule]) -> Instance {
    assert!(rules.iter().all(|r| r.neg.is_empty()), "least_model needs a positive program");
    let mut m = FixedBitSet::with_capacity(g.num_atoms());
    for &b in g.base_facts() {
        m.insert(b as usize);
    }
    loop {
        let mut next = m.clone();
        for r in rules {
            if r.pos.iter().all(|&a| m.contains(a as usize)) {
                next.insert(r.head as usize);
            }
        }
        if next == m {
            return g.instance(&m, true);
        }
        m = next;
    }
}
