mod common;

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use repairqa::engine::EngineConfig;
use repairqa::model::{Label, PreferenceKind, RuleSet};
use repairqa::repair::{preferred_repairs, PreferenceOrder, SearchConfig, SearchStrategy};
use repairqa::synth::{random_instance, RandomParams};
use repairqa::syntax::parse_program;

use common::*;

fn ex1() -> RuleSet {
    parse_program(EX1_RULES).unwrap().rules
}

fn arb_subset() -> impl Strategy<Value = BTreeSet<Label>> {
    prop::collection::btree_set(prop::sample::select(labels(&["r1", "r2", "r3", "r4", "r5", "r6", "r7"])), 0..=7)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // the crate's orders agree with the definitions and are preorders
    #[test]
    fn orders_match_definitions(s in arb_subset(), t in arb_subset(), u in arb_subset(), k in 0usize..5) {
        let doc = parse_program(EX1_RULES).unwrap();
        let kind = PreferenceKind::ALL[k];
        let spec = doc.preference(kind).unwrap();
        let order = PreferenceOrder::new(spec.clone(), &doc.rules).unwrap();
        let mask = |x: &BTreeSet<Label>| doc.rules.mask_of(x.iter()).unwrap();
        prop_assert_eq!(order.leq(&mask(&s), &mask(&t)), leq(&spec, &s, &t));
        prop_assert!(order.leq(&mask(&s), &mask(&s)));
        if leq(&spec, &s, &t) && leq(&spec, &t, &u) {
            prop_assert!(leq(&spec, &s, &u));
        }
        // ⊆ refines every other order
        if s.is_subset(&t) {
            prop_assert!(leq(&spec, &s, &t));
        }
    }
}

#[test]
fn specialised_search_equals_reference() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..60 {
        let inst = random_instance(&mut rng, &RandomParams { max_rules: 6, constraints: 2, ..RandomParams::default() });
        for kind in PreferenceKind::ALL {
            let spec = inst.preference(kind);
            let fast = preferred_repairs(&inst.db, &inst.rules, &spec, &SearchConfig::default()).unwrap();
            let cfg = SearchConfig { strategy: SearchStrategy::Reference, ..SearchConfig::default() };
            let reference = preferred_repairs(&inst.db, &inst.rules, &spec, &cfg).unwrap();
            assert_eq!(fast.label_sets(), reference.label_sets(), "{kind} on\n{}", inst.rules_text());
        }
    }
}

#[test]
fn witnesses_are_stable_models_of_their_repair() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..40 {
        let inst = random_instance(&mut rng, &RandomParams { constraints: 2, max_rules: 6, ..RandomParams::default() });
        let rs = preferred_repairs(&inst.db, &inst.rules, &inst.preference(PreferenceKind::Subset), &SearchConfig::default())
            .unwrap();
        for r in rs.iter() {
            let s: BTreeSet<Label> = r.rules.iter().cloned().collect();
            assert!(models_of(&inst.db, &inst.rules, &s).contains(&r.witness));
            for a in inst.db.iter() {
                assert!(r.witness.contains(a));
            }
        }
    }
}

#[test]
fn parallel_and_sequential_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for _ in 0..20 {
        let inst = random_instance(&mut rng, &RandomParams { constraints: 2, max_rules: 6, ..RandomParams::default() });
        for kind in PreferenceKind::ALL {
            let spec = inst.preference(kind);
            let seq = SearchConfig { jobs: 1, ..SearchConfig::default() };
            let par = SearchConfig { jobs: 3, ..SearchConfig::default() };
            assert_eq!(
                preferred_repairs(&inst.db, &inst.rules, &spec, &seq).unwrap(),
                preferred_repairs(&inst.db, &inst.rules, &spec, &par).unwrap()
            );
        }
    }
}

#[test]
fn masked_and_restricted_grounding_agree() {
    // the search evaluates subsets on one shared grounding; the oracle grounds
    // each subset afresh
    let rules = ex1();
    let db = repairqa::syntax::parse_database(EX1_FACTS).unwrap();
    let engine = repairqa::engine::Engine::new(db.clone(), rules.clone(), EngineConfig::default());
    for s in all_subsets(&rules) {
        let mask = rules.mask_of(s.iter()).unwrap();
        let shared: BTreeSet<_> = engine.stable_models(&mask, 0).unwrap().into_iter().collect();
        let fresh: BTreeSet<_> = models_of(&db, &rules, &s).into_iter().collect();
        assert_eq!(shared, fresh, "{s:?}");
    }
}
