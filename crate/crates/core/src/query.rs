//! Normal Boolean conjunctive queries: safety checks, evaluation in a model,
//! entailment under stable models and certain answers over preferred repairs.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::analysis::{analyze, ClassReport};
use crate::engine::{Engine, EngineConfig, EngineError};
use crate::exec;
use crate::model::{apply_substitution, match_atom, Atom, Database, Instance, Label, PreferenceSpec, Query, RuleSet, Substitution};
use crate::repair::{SearchConfig, SearchError, Searcher};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QueryError {
    #[error("query is not safe: variable {0} occurs only under negation")]
    Unsafe(String),
    #[error("class violation: {0}")]
    ClassViolation(String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// Every variable of a negated atom also occurs in a positive one.
pub fn check_safe(q: &Query) -> bool {
    unsafe_var(q).is_none()
}

fn unsafe_var(q: &Query) -> Option<String> {
    let mut pos = Vec::new();
    for a in q.pos() {
        a.collect_vars(&mut pos);
    }
    q.neg().iter().flat_map(|a| a.vars()).find(|v| !pos.contains(v)).map(|v| v.to_string())
}

/// Every negated atom has a positive atom containing all of its arguments.
pub fn check_covered(q: &Query) -> bool {
    q.neg().iter().all(|n| q.pos().iter().any(|p| n.args.iter().all(|t| p.args.contains(t))))
}

/// `M ⊨ Q`: some assignment maps `Q⁺` into `M` and `Q⁻` outside it.
pub fn holds_in_model(m: &Instance, q: &Query) -> Result<bool, QueryError> {
    if let Some(v) = unsafe_var(q) {
        return Err(QueryError::Unsafe(v));
    }
    let mut by_pred: HashMap<_, Vec<&Atom>> = HashMap::new();
    for a in m.iter() {
        by_pred.entry(&a.pred).or_default().push(a);
    }
    Ok(search(q, m, &by_pred, 0, &Substitution::new()))
}

fn search(q: &Query, m: &Instance, by_pred: &HashMap<&crate::model::Predicate, Vec<&Atom>>, i: usize, h: &Substitution) -> bool {
    if i == q.pos().len() {
        return q.neg().iter().all(|n| {
            let g = apply_substitution(n, h, true).expect("safe queries bind negated variables");
            !m.contains(&g)
        });
    }
    let pattern = &q.pos()[i];
    by_pred
        .get(&pattern.pred)
        .into_iter()
        .flatten()
        .filter_map(|fact| match_atom(pattern, fact, h))
        .any(|ext| search(q, m, by_pred, i + 1, &ext))
}

/// `D ∪ S ⊨_s Q`. Vacuously true, with a logged warning, when `D ∪ S` has
/// no stable model.
pub fn entails_s(db: &Database, rules: &RuleSet, q: &Query, cfg: &EngineConfig) -> Result<bool, QueryError> {
    let engine = Engine::new(db.clone(), rules.clone(), cfg.clone());
    let models = engine.stable_models(&rules.full_mask(), 0)?;
    if models.is_empty() {
        log::warn!("no stable model: entailment holds vacuously");
    }
    for m in &models {
        if !holds_in_model(m, q)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A repair and one of its stable models in which the query fails.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    pub repair: Vec<Label>,
    pub model: Instance,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub entailed: bool,
    pub repairs_examined: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub countermodel: Option<Countermodel>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct AnswerConfig {
    pub search: SearchConfig,
    /// Turn class warnings into errors.
    pub strict_classes: bool,
}

/// Class caveats for answering `q` over `rules`.
pub fn class_warnings(report: &ClassReport, q: &Query) -> Vec<String> {
    let mut out = Vec::new();
    if !report.r_acyclic {
        out.push("rule set is not R-acyclic: termination is not guaranteed".to_string());
    }
    if report.guarded && report.stratified.is_none() && !check_covered(q) {
        out.push("query is not covered, and the rule set is guarded with full negation".to_string());
    }
    out
}

/// Whether `q` holds in every stable model of every preferred repair.
///
/// Repairs are examined in label order; the first failing one is reported.
pub fn certain_answer(db: &Database, rules: &RuleSet, pref: &PreferenceSpec, q: &Query, cfg: &AnswerConfig) -> Result<Verdict, QueryError> {
    if let Some(v) = unsafe_var(q) {
        return Err(QueryError::Unsafe(v));
    }
    pref.validate(rules).map_err(SearchError::from)?;
    let report = analyze(rules, cfg.search.jobs);
    let warnings = class_warnings(&report, q);
    if cfg.strict_classes {
        if let Some(w) = warnings.first() {
            return Err(QueryError::ClassViolation(w.clone()));
        }
    }
    for w in &warnings {
        log::warn!("{w}");
    }
    let engine = Engine::new(db.clone(), rules.clone(), cfg.search.engine.clone());
    let searcher = Searcher::new(&engine, cfg.search.clone());
    let repairs = searcher.repairs(pref)?;
    let failing = exec::find_map_first(&repairs.repairs, cfg.search.jobs, |r| {
        let models = match engine.stable_models(&r.mask, 0) {
            Ok(m) => m,
            Err(e) => return Some(Err(QueryError::from(e))),
        };
        for m in models {
            match holds_in_model(&m, q) {
                Ok(true) => {}
                Ok(false) => {
                    return Some(Ok(Countermodel {
                        repair: r.rules.clone(),
                        model: m,
                        reason: "no assignment satisfies the query in this stable model".to_string(),
                    }))
                }
                Err(e) => return Some(Err(e)),
            }
        }
        None
    });
    let countermodel = failing.transpose()?;
    Ok(Verdict { entailed: countermodel.is_none(), repairs_examined: repairs.len(), countermodel, warnings })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PreferenceKind;
    use crate::syntax::{parse_database, parse_program, parse_query};

    const EX1: &str = include_str!("../../../data/ex1.rules");

    #[test]
    fn safety_and_coverage() {
        let q = parse_query("? Bird(x), not Trogloxene(x)").unwrap();
        assert!(check_safe(&q) && check_covered(&q));
        let q = parse_query("? R(x, y), not S(y, z)").unwrap();
        assert!(!check_safe(&q));
        let q = parse_query("? R(x), S(y), not T(x, y)").unwrap();
        assert!(check_safe(&q) && !check_covered(&q));
        let q = parse_query("? not P(x)").unwrap();
        assert!(matches!(holds_in_model(&Instance::default(), &q), Err(QueryError::Unsafe(_))));
    }

    #[test]
    fn empty_query_holds() {
        let q = parse_query("?").unwrap();
        assert!(holds_in_model(&Instance::default(), &q).unwrap());
    }

    #[test]
    fn entailment_on_the_five_rule_subset() {
        let doc = parse_program(EX1).unwrap();
        let db = parse_database("Bat(a). Mammal(a).").unwrap();
        let keep: Vec<Label> = ["r1", "r2", "r3", "r4", "r5"].iter().map(Label::new).collect();
        let s = doc.rules.restrict(&doc.rules.mask_of(keep.iter()).unwrap());
        let cfg = EngineConfig::default();
        assert!(entails_s(&db, &s, &parse_query("? Mammal(a)").unwrap(), &cfg).unwrap());
        assert!(!entails_s(&db, &s, &parse_query("? CanNotFly(a)").unwrap(), &cfg).unwrap());
        assert!(entails_s(&db, &s, &parse_query("?").unwrap(), &cfg).unwrap());
        // inconsistent: vacuous
        assert!(entails_s(&db, &doc.rules, &parse_query("? Nothing(a)").unwrap(), &cfg).unwrap());
    }

    #[test]
    fn example_certain_answers() {
        let doc = parse_program(EX1).unwrap();
        let db = parse_database("Bat(a). Mammal(a).").unwrap();
        let qa = parse_query("? Mammal(a)").unwrap();
        let qb = parse_query("? Bird(a)").unwrap();
        let cfg = AnswerConfig::default();
        for kind in [PreferenceKind::Subset, PreferenceKind::PrioSubset] {
            let pref = doc.preference(kind).unwrap();
            assert!(certain_answer(&db, &doc.rules, &pref, &qa, &cfg).unwrap().entailed);
            let v = certain_answer(&db, &doc.rules, &pref, &qb, &cfg).unwrap();
            assert!(!v.entailed);
            let cm = v.countermodel.unwrap();
            assert_eq!(cm.repair, ["r1", "r2", "r3", "r4", "r6", "r7"].map(Label::new));
        }
    }
}
