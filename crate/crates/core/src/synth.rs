//! Generators for random small instances and for benchmark instances.

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::model::{Atom, Database, Label, ModelError, PreferenceKind, PreferenceSpec, Query, Rule, RuleSet, Term};

/// A database with a rule set and the parameters of every preference kind.
#[derive(Clone, Debug)]
pub struct Instance {
    pub name: String,
    pub db: Database,
    pub rules: RuleSet,
    pub prioritization: Vec<Vec<Label>>,
    pub weights: BTreeMap<Label, i64>,
}

impl Instance {
    pub fn preference(&self, kind: PreferenceKind) -> PreferenceSpec {
        match kind {
            PreferenceKind::Subset | PreferenceKind::Cardinality => PreferenceSpec::new(kind),
            PreferenceKind::PrioSubset | PreferenceKind::PrioCardinality => {
                PreferenceSpec::prioritized(kind, self.prioritization.clone())
            }
            PreferenceKind::Weight => PreferenceSpec::weighted(self.weights.clone()),
        }
    }

    /// The rules in the concrete syntax, with `@priority` and `@weight` lines.
    pub fn rules_text(&self) -> String {
        let mut out = String::new();
        for r in &self.rules {
            out.push_str(&format!("{r}\n"));
        }
        for (i, level) in self.prioritization.iter().enumerate() {
            let names: Vec<&str> = level.iter().map(Label::as_str).collect();
            out.push_str(&format!("@priority {} = {}.\n", i + 1, names.join(", ")));
        }
        for (l, w) in &self.weights {
            out.push_str(&format!("@weight {l} = {w}.\n"));
        }
        out
    }
}

/// Shape of a random small instance.
#[derive(Clone, Debug)]
pub struct RandomParams {
    pub max_rules: usize,
    pub max_facts: usize,
    pub max_negations: usize,
    /// Constraints added on top of `max_rules`.
    pub constraints: usize,
    /// Chance that a rule is existential.
    pub existential: f64,
}

impl Default for RandomParams {
    fn default() -> Self {
        RandomParams { max_rules: 8, max_facts: 12, max_negations: 3, constraints: 0, existential: 0.15 }
    }
}

const CONSTANTS: [&str; 3] = ["a", "b", "c"];
// (name, arity, layer); rules never derive a lower layer, and existential
// rules read only layer 0, which no existential rule writes
const PREDS: [(&str, usize, usize); 9] = [
    ("A", 1, 0),
    ("B", 1, 0),
    ("R", 2, 0),
    ("C", 1, 1),
    ("D", 1, 1),
    ("S", 2, 1),
    ("E", 1, 2),
    ("F", 1, 2),
    ("T", 2, 2),
];

fn var(i: usize) -> Term {
    Term::var(["x", "y", "z"][i])
}

fn pick_pred<R: Rng>(rng: &mut R, layers: std::ops::RangeInclusive<usize>) -> (&'static str, usize) {
    let choices: Vec<_> = PREDS.iter().filter(|p| layers.contains(&p.2)).collect();
    let p = choices.choose(rng).unwrap();
    (p.0, p.1)
}

fn atom_over<R: Rng>(rng: &mut R, name: &str, arity: usize, vars: &[Term]) -> Atom {
    Atom::new(name, (0..arity).map(|_| vars.choose(rng).unwrap().clone()).collect())
}

fn random_rule<R: Rng>(rng: &mut R, label: String, params: &RandomParams, negations_left: &mut usize) -> Rule {
    let label = Label::new(label);
    if rng.gen_bool(params.existential) {
        // A(x) -> exists y . S(x, y), C(y)
        let (b, ba) = pick_pred(rng, 0..=0);
        let body = atom_over(rng, b, ba, &[var(0)]);
        let mut head = vec![Atom::new("S", vec![var(0), var(1)])];
        if rng.gen_bool(0.5) {
            head.push(Atom::new(["C", "D"].choose(rng).unwrap(), vec![var(1)]));
        }
        return Rule::new(label, vec![body], vec![], head, vec![var_name(1)]).expect("well-formed existential rule");
    }
    let head_layer = rng.gen_range(0..=2);
    let n_body = rng.gen_range(1..=2);
    let mut body = Vec::new();
    let mut vars: Vec<Term> = Vec::new();
    for _ in 0..n_body {
        let (p, arity) = pick_pred(rng, 0..=head_layer);
        let pool: Vec<Term> = (0..2).map(var).collect();
        let a = atom_over(rng, p, arity, &pool);
        for t in &a.args {
            if !vars.contains(t) {
                vars.push(t.clone());
            }
        }
        body.push(a);
    }
    let mut neg = Vec::new();
    if *negations_left > 0 && rng.gen_bool(0.4) {
        *negations_left -= 1;
        let (p, arity) = pick_pred(rng, 0..=2);
        neg.push(atom_over(rng, p, arity, &vars));
    }
    let head_choices: Vec<_> = PREDS.iter().filter(|p| p.2 == head_layer && !(p.2 == 0 && p.1 == 2)).collect();
    let h = head_choices.choose(rng).unwrap();
    let head = atom_over(rng, h.0, h.1, &vars);
    Rule::new(label, body, neg, vec![head], vec![]).expect("safe by construction")
}

fn var_name(i: usize) -> crate::model::Name {
    ["x", "y", "z"][i].into()
}

fn random_constraint<R: Rng>(rng: &mut R, label: String, negations_left: &mut usize) -> Rule {
    let (p, pa) = pick_pred(rng, 0..=2);
    let (q, qa) = pick_pred(rng, 0..=2);
    let vars = [var(0)];
    let body = vec![atom_over(rng, p, pa, &vars), atom_over(rng, q, qa, &vars)];
    let mut neg = Vec::new();
    if *negations_left > 0 && rng.gen_bool(0.3) {
        *negations_left -= 1;
        let (n, na) = pick_pred(rng, 1..=2);
        neg.push(atom_over(rng, n, na, &vars));
    }
    Rule::constraint(Label::new(label), body, neg).expect("safe by construction")
}

/// A random instance over a small fixed vocabulary. Every rule set it builds
/// is R-acyclic, so grounding always terminates.
pub fn random_instance<R: Rng>(rng: &mut R, params: &RandomParams) -> Instance {
    let mut negations_left = rng.gen_range(0..=params.max_negations);
    let n_rules = rng.gen_range(1..=params.max_rules.max(1));
    let mut rules = Vec::new();
    for i in 0..n_rules {
        rules.push(random_rule(rng, format!("r{}", i + 1), params, &mut negations_left));
    }
    for i in 0..params.constraints {
        rules.push(random_constraint(rng, format!("r{}", n_rules + i + 1), &mut negations_left));
    }
    let n_facts = rng.gen_range(1..=params.max_facts.max(1));
    let mut facts = Vec::new();
    for _ in 0..n_facts {
        let (p, arity) = pick_pred(rng, 0..=0);
        let args = (0..arity).map(|_| Term::constant(CONSTANTS.choose(rng).unwrap())).collect();
        facts.push(Atom::new(p, args));
    }
    let rules = RuleSet::new(rules).expect("labels are distinct");
    let labels = rules.labels();
    let n_levels = rng.gen_range(1..=3.min(labels.len()));
    let mut shuffled = labels.clone();
    shuffled.shuffle(rng);
    let mut prioritization = vec![Vec::new(); n_levels];
    for (i, l) in shuffled.into_iter().enumerate() {
        let level = if i < n_levels { i } else { rng.gen_range(0..n_levels) };
        prioritization[level].push(l);
    }
    for level in &mut prioritization {
        level.sort();
    }
    let weights = labels.iter().map(|l| (l.clone(), rng.gen_range(1..=5))).collect();
    Instance {
        name: "random".into(),
        db: Database::new(facts).expect("ground facts"),
        rules,
        prioritization,
        weights,
    }
}

/// A random safe query over the same vocabulary.
pub fn random_query<R: Rng>(rng: &mut R) -> Query {
    let n_pos = rng.gen_range(1..=2);
    let mut pos = Vec::new();
    let mut vars: Vec<Term> = Vec::new();
    for _ in 0..n_pos {
        let (p, arity) = pick_pred(rng, 0..=2);
        let args: Vec<Term> = (0..arity)
            .map(|_| if rng.gen_bool(0.3) { Term::constant(CONSTANTS.choose(rng).unwrap()) } else { var(rng.gen_range(0..2)) })
            .collect();
        for t in &args {
            if matches!(t, Term::Var(_)) && !vars.contains(t) {
                vars.push(t.clone());
            }
        }
        pos.push(Atom::new(p, args));
    }
    let mut neg = Vec::new();
    if rng.gen_bool(0.4) {
        let (p, arity) = pick_pred(rng, 0..=2);
        let pool: Vec<Term> = if vars.is_empty() { vec![Term::constant("a")] } else { vars.clone() };
        neg.push(atom_over(rng, p, arity, &pool));
    }
    Query::new(pos, neg).expect("no nulls")
}

/// Shape of a benchmark instance.
#[derive(Clone, Debug)]
pub struct BenchParams {
    pub facts: usize,
    pub reliable: usize,
    pub unreliable: usize,
    pub seed: u64,
}

impl BenchParams {
    pub fn new(facts: usize, reliable: usize, unreliable: usize) -> Self {
        BenchParams { facts, reliable, unreliable, seed: 7 }
    }
}

/// A layered ontology-like instance: a stratified, R-acyclic core of class
/// hierarchy, role typing, existential and negation rules, plus
/// `unreliable` constraints at the lowest priority that the data violates.
///
/// Classes fall into three bands and rules only ever derive upwards, so the
/// core is consistent and every derivation is short.
pub fn bench_instance(p: &BenchParams) -> Result<Instance, ModelError> {
    let mut rng = StdRng::seed_from_u64(p.seed);
    let k = (p.reliable / 3).max(6);
    let band = |c: usize| 3 * c / k;
    let bottom: Vec<usize> = (0..k).filter(|&c| band(c) == 0).collect();
    let middle: Vec<usize> = (0..k).filter(|&c| band(c) == 1).collect();
    let top: Vec<usize> = (0..k).filter(|&c| band(c) == 2).collect();
    let roles = (p.reliable / 10).max(2);
    let class = |c: usize, t: Term| Atom::new(format!("C{c}"), vec![t]);
    let (x, y) = (Term::var("x"), Term::var("y"));

    let mut rules = Vec::new();
    let mut next = 1;
    let mut label = || {
        let l = Label::new(format!("r{next}"));
        next += 1;
        l
    };
    // shares of the reliable budget
    let n_exist = (p.reliable / 8).max(1);
    let n_typing = (p.reliable / 6).max(1);
    let n_neg = (p.reliable / 6).max(1);
    let n_sub = p.reliable.saturating_sub(n_exist + n_typing + n_neg);
    for _ in 0..n_sub {
        let (a, b) = if rng.gen_bool(0.5) {
            (*bottom.choose(&mut rng).unwrap(), *middle.choose(&mut rng).unwrap())
        } else {
            (*middle.choose(&mut rng).unwrap(), *top.choose(&mut rng).unwrap())
        };
        rules.push(Rule::new(label(), vec![class(a, x.clone())], vec![], vec![class(b, x.clone())], vec![])?);
    }
    for j in 0..n_exist {
        let a = *bottom.choose(&mut rng).unwrap();
        let b = *top.choose(&mut rng).unwrap();
        let role = Atom::new(format!("Has{j}"), vec![x.clone(), y.clone()]);
        rules.push(Rule::new(label(), vec![class(a, x.clone())], vec![], vec![role, class(b, y.clone())], vec!["y".into()])?);
    }
    for _ in 0..n_typing {
        let r = rng.gen_range(0..roles);
        let role = Atom::new(format!("P{r}"), vec![x.clone(), y.clone()]);
        let (c, t) = if rng.gen_bool(0.5) {
            (*middle.choose(&mut rng).unwrap(), x.clone())
        } else {
            (*middle.choose(&mut rng).unwrap(), y.clone())
        };
        rules.push(Rule::new(label(), vec![role], vec![], vec![class(c, t)], vec![])?);
    }
    for _ in 0..n_neg {
        let a = *bottom.choose(&mut rng).unwrap();
        let b = *middle.choose(&mut rng).unwrap();
        let c = *top.choose(&mut rng).unwrap();
        rules.push(Rule::new(label(), vec![class(a, x.clone())], vec![class(b, x.clone())], vec![class(c, x.clone())], vec![])?);
    }
    let reliable: Vec<Label> = rules.iter().map(|r| r.label().clone()).collect();

    // each unreliable constraint clashes a bottom class with a class some
    // reliable rule derives from it
    let subclass: Vec<(usize, usize)> = rules
        .iter()
        .filter(|r| r.body_pos().len() == 1 && r.body_neg().is_empty() && r.head().len() == 1 && r.body_pos()[0].args.len() == 1)
        .filter_map(|r| {
            let num = |a: &Atom| a.pred.name.strip_prefix('C')?.parse::<usize>().ok();
            Some((num(&r.body_pos()[0])?, num(&r.head()[0])?))
        })
        .filter(|&(a, _)| band(a) == 0)
        .collect();
    let mut unreliable = Vec::new();
    for i in 0..p.unreliable {
        let (a, b) = subclass[i * 7 % subclass.len().max(1)];
        let l = label();
        let rule = if i % 3 == 2 {
            let c = *top.choose(&mut rng).unwrap();
            Rule::constraint(l.clone(), vec![class(a, x.clone())], vec![class(c, x.clone())])?
        } else {
            Rule::constraint(l.clone(), vec![class(a, x.clone()), class(b, x.clone())], vec![])?
        };
        rules.push(rule);
        unreliable.push(l);
    }

    let individuals = (p.facts / 3).max(1);
    let ind = |i: usize| Term::constant(format!("i{i}"));
    let mut facts = std::collections::BTreeSet::new();
    // the clashing classes are populated first so every constraint fires
    for (i, l) in unreliable.iter().enumerate() {
        let r = rules.iter().find(|r| r.label() == l).unwrap();
        facts.insert(Atom::new(r.body_pos()[0].pred.name.as_ref(), vec![ind(i)]));
    }
    let mut guard = 0;
    while facts.len() < p.facts && guard < p.facts * 8 {
        guard += 1;
        if rng.gen_bool(0.6) {
            let c = *bottom.choose(&mut rng).unwrap();
            facts.insert(class(c, ind(rng.gen_range(0..individuals))));
        } else {
            let r = rng.gen_range(0..roles);
            let a = ind(rng.gen_range(0..individuals));
            let b = ind(rng.gen_range(0..individuals));
            facts.insert(Atom::new(format!("P{r}"), vec![a, b]));
        }
    }

    let rules = RuleSet::new(rules)?;
    let mut weights = BTreeMap::new();
    for l in &reliable {
        weights.insert(l.clone(), rng.gen_range(10..=20));
    }
    for l in &unreliable {
        weights.insert(l.clone(), 1);
    }
    let mut prioritization = vec![reliable];
    if !unreliable.is_empty() {
        prioritization.push(unreliable);
    }
    Ok(Instance {
        name: format!("d{}t{}", p.facts, p.unreliable),
        db: Database::new(facts)?,
        rules,
        prioritization,
        weights,
    })
}
