use std::collections::BTreeSet;

use repairqa::analysis::{
    analyze, is_r_acyclic, negatively_relies, positively_relies, reliance_graph, validate_predicate_levels,
    validate_r_stratification,
};
use repairqa::model::{Label, Predicate, RuleSet};
use repairqa::syntax::parse_program;

const EX1: &str = include_str!("../../../data/ex1.rules");

fn ex1() -> RuleSet {
    parse_program(EX1).unwrap().rules
}

fn edge(a: &str, b: &str) -> (Label, Label) {
    (Label::new(a), Label::new(b))
}

#[test]
fn example_reliance_edges() {
    let rs = ex1();
    let g = reliance_graph(&rs, 0);
    for (a, b) in [("r1", "r5"), ("r2", "r3"), ("r5", "r6"), ("r5", "r7"), ("r3", "r6")] {
        assert!(g.pos_edges.contains(&edge(a, b)), "missing {a} -> {b}");
    }
    assert_eq!(g.neg_edges, BTreeSet::from([edge("r1", "r4")]));
    eprintln!("positive edges: {:?}", g.pos_edges);
}

#[test]
fn example_pairs() {
    let rs = ex1();
    let r = |l: &str| rs.get(&Label::new(l)).unwrap().clone();
    assert!(positively_relies(&r("r2"), &r("r3")));
    assert!(positively_relies(&r("r1"), &r("r5")));
    assert!(!positively_relies(&r("r3"), &r("r1")));
    assert!(negatively_relies(&r("r1"), &r("r4")));
    assert!(!negatively_relies(&r("r2"), &r("r4")));
    for a in rs.iter() {
        assert!(!negatively_relies(a, &r("r5")));
    }
}

#[test]
fn example_classes() {
    let rs = ex1();
    let report = analyze(&rs, 1);
    assert!(report.r_acyclic);
    assert!(report.guarded);
    let p = report.r_stratification.clone().unwrap();
    assert!(validate_r_stratification(&p, &report.reliance).is_ok());
    let pos = |l: &str| p.iter().position(|b| b.contains(&Label::new(l))).unwrap();
    assert!(pos("r1") < pos("r4"));
    let levels = repairqa::analysis::predicate_stratify(&rs).unwrap();
    assert!(validate_predicate_levels(&rs, &levels));
    assert!(levels[&Predicate::new("CanFly", 1)] < levels[&Predicate::new("CanNotFly", 1)]);
}

#[test]
fn existential_cycle_is_not_r_acyclic() {
    let rs = parse_program("P(x) -> exists y . R(x, y).\nR(x, y) -> P(y).").unwrap().rules;
    let g = reliance_graph(&rs, 1);
    assert!(!is_r_acyclic(&rs, &g));
    assert!(is_r_acyclic(&RuleSet::empty(), &reliance_graph(&RuleSet::empty(), 1)));
}

#[test]
fn negation_free_sets_always_r_stratify() {
    let rs = parse_program("a: P(x) -> Q(x).\nb: Q(x) -> P(x).\nc: Q(x), P(x) -> bottom.").unwrap().rules;
    let g = reliance_graph(&rs, 1);
    assert!(g.neg_edges.is_empty());
    let p = repairqa::analysis::r_stratify(&rs, &g).unwrap();
    assert!(validate_r_stratification(&p, &g).is_ok());
}
