//! Positive and negative reliance between rules.
//!
//! Both relations quantify over every database `D` and substitution `θ`. The
//! decision procedure here enumerates `θ` over a canonical universe (the
//! rules' own constants plus one fresh constant per universal variable, and,
//! for positive reliance, the nulls introduced by the first rule's head) up to
//! renaming of the fresh constants. For each `θ` it builds the smallest
//! database the positive conditions force and tests the conditions literally.
//! The remaining conditions only forbid atoms from `D`, so the smallest
//! candidate is the best one, and any witness over a larger universe maps
//! onto one of these by identifying constants.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use serde::Serialize;

use crate::engine::{skolemize_rule, SkolemRule};
use crate::exec;
use crate::model::{apply_all, Atom, Label, Name, Predicate, Rule, RuleSet, Substitution, Term};

/// Rule-level dependency graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct RelianceGraph {
    pub nodes: Vec<Label>,
    /// `(r1, r2)` means `r1 →⁺ r2`: `r2` positively relies on `r1`.
    pub pos_edges: BTreeSet<(Label, Label)>,
    /// `(r1, r2)` means `r1 →⁻ r2`.
    pub neg_edges: BTreeSet<(Label, Label)>,
}

impl RelianceGraph {
    pub fn is_empty(&self) -> bool {
        self.pos_edges.is_empty() && self.neg_edges.is_empty()
    }
}

/// Skolemized pair of rules, renamed apart.
struct Pair {
    r1: SkolemRule,
    r2: SkolemRule,
    u1: Vec<Name>,
    u2: Vec<Name>,
    constants: Vec<Name>,
    fresh: Vec<Name>,
}

fn prepare(r1: &Rule, r2: &Rule) -> Pair {
    // skolemize before renaming so both copies of a rule share skolem symbols
    let s1 = skolemize_rule(r1).rename_vars(&|v| format!("{v}#1"));
    let s2 = skolemize_rule(r2).rename_vars(&|v| format!("{v}#2"));
    let u1: Vec<Name> = r1.univ_vars().iter().map(|v| Arc::from(format!("{v}#1"))).collect();
    let u2: Vec<Name> = r2.univ_vars().iter().map(|v| Arc::from(format!("{v}#2"))).collect();
    let mut constants = Vec::new();
    for a in s1.body_pos.iter().chain(&s1.body_neg).chain(&s1.head).chain(&s2.body_pos).chain(&s2.body_neg).chain(&s2.head) {
        a.collect_constants(&mut constants);
    }
    let mut prefix = String::from("_fresh");
    while constants.iter().any(|c| c.starts_with(&prefix)) {
        prefix.push('_');
    }
    let fresh = (0..u1.len() + u2.len()).map(|i| Arc::from(format!("{prefix}{i}"))).collect();
    Pair { r1: s1, r2: s2, u1, u2, constants, fresh }
}

fn preds(atoms: &[Atom]) -> HashSet<&Predicate> {
    atoms.iter().map(|a| &a.pred).collect()
}

/// Enumerates assignments of `vars[i..]`, canonical in the fresh constants:
/// a variable may take any rule constant, any fresh constant already used, the
/// next unused fresh constant, or any of `extra`.
fn enumerate(
    vars: &[Name],
    i: usize,
    used_fresh: usize,
    pair: &Pair,
    extra: &[Term],
    theta: &mut Substitution,
    visit: &mut dyn FnMut(&Substitution, usize) -> bool,
) -> bool {
    if i == vars.len() {
        return visit(theta, used_fresh);
    }
    let v = &vars[i];
    let mut choices: Vec<(Term, usize)> = pair.constants.iter().map(|c| (Term::Const(c.clone()), used_fresh)).collect();
    for f in &pair.fresh[..used_fresh] {
        choices.push((Term::Const(f.clone()), used_fresh));
    }
    if used_fresh < pair.fresh.len() {
        choices.push((Term::Const(pair.fresh[used_fresh].clone()), used_fresh + 1));
    }
    choices.extend(extra.iter().map(|t| (t.clone(), used_fresh)));
    for (t, next_used) in choices {
        theta.insert(v.clone(), t);
        if enumerate(vars, i + 1, next_used, pair, extra, theta, visit) {
            return true;
        }
    }
    theta.remove(v);
    false
}

fn ground(atoms: &[Atom], theta: &Substitution) -> Vec<Atom> {
    apply_all(atoms, theta, true).expect("universal variables are all bound")
}

fn nulls_of(atoms: &[Atom]) -> Vec<Term> {
    let mut out: Vec<Term> = Vec::new();
    for a in atoms {
        for t in &a.args {
            if t.has_skolem() && !out.contains(t) {
                out.push(t.clone());
            }
        }
    }
    out
}

/// `r1 →⁺ r2`: applying `r1` can newly enable `r2`.
pub fn positively_relies(r1: &Rule, r2: &Rule) -> bool {
    let h1: HashSet<&Predicate> = preds(r1.head());
    if !r2.body_pos().iter().any(|a| h1.contains(&a.pred)) {
        return false;
    }
    let pair = prepare(r1, r2);
    let mut theta = Substitution::new();
    enumerate(&pair.u1.clone(), 0, 0, &pair, &[], &mut theta, &mut |t1, used| {
        let b1p = ground(&pair.r1.body_pos, t1);
        let b1n = ground(&pair.r1.body_neg, t1);
        let h1 = ground(&pair.r1.head, t1);
        let nulls = nulls_of(&h1);
        let mut theta2 = t1.clone();
        enumerate(&pair.u2.clone(), 0, used, &pair, &nulls, &mut theta2, &mut |t, _| {
            let b2p = ground(&pair.r2.body_pos, t);
            let b2n = ground(&pair.r2.body_neg, t);
            let h2 = ground(&pair.r2.head, t);
            let h1s: HashSet<&Atom> = h1.iter().collect();
            let mut d: HashSet<&Atom> = b1p.iter().collect();
            d.extend(b2p.iter().filter(|a| !h1s.contains(a)));
            if d.iter().any(|a| a.has_skolem()) {
                return false;
            }
            let in_d_or_h1 = |a: &Atom| d.contains(a) || h1s.contains(a);
            b1p.iter().all(|a| d.contains(a))
                && b1n.iter().all(|a| !d.contains(a))
                && b2p.iter().all(in_d_or_h1)
                && b2n.iter().all(|a| !in_d_or_h1(a))
                && !b2p.iter().all(|a| d.contains(a))
                && !h2.iter().all(in_d_or_h1)
        })
    })
}

/// `r1 →⁻ r2`: applying `r1` can block `r2` through one of its negated atoms.
pub fn negatively_relies(r1: &Rule, r2: &Rule) -> bool {
    let h1: HashSet<&Predicate> = preds(r1.head());
    if !r2.body_neg().iter().any(|a| h1.contains(&a.pred)) {
        return false;
    }
    let pair = prepare(r1, r2);
    let vars: Vec<Name> = pair.u1.iter().chain(&pair.u2).cloned().collect();
    let mut theta = Substitution::new();
    enumerate(&vars, 0, 0, &pair, &[], &mut theta, &mut |t, _| {
        let b1p = ground(&pair.r1.body_pos, t);
        let b1n = ground(&pair.r1.body_neg, t);
        let h1 = ground(&pair.r1.head, t);
        let b2p = ground(&pair.r2.body_pos, t);
        let b2n = ground(&pair.r2.body_neg, t);
        let d: HashSet<&Atom> = b1p.iter().chain(&b2p).collect();
        let h1s: HashSet<&Atom> = h1.iter().collect();
        b1p.iter().all(|a| d.contains(a))
            && b1n.iter().all(|a| !d.contains(a))
            && b2p.iter().all(|a| d.contains(a))
            && b2n.iter().any(|a| h1s.contains(a))
            && b2n.iter().all(|a| !d.contains(a))
    })
}

/// Tests every ordered pair of rules, self-pairs included.
pub fn reliance_graph(rules: &RuleSet, jobs: usize) -> RelianceGraph {
    let n = rules.len();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
    let rs = rules.rules();
    let verdicts = exec::map(&pairs, jobs, |&(i, j)| (positively_relies(&rs[i], &rs[j]), negatively_relies(&rs[i], &rs[j])));
    let mut pos_edges = BTreeSet::new();
    let mut neg_edges = BTreeSet::new();
    for (&(i, j), (p, q)) in pairs.iter().zip(verdicts) {
        let e = (rs[i].label().clone(), rs[j].label().clone());
        if p {
            pos_edges.insert(e.clone());
        }
        if q {
            neg_edges.insert(e);
        }
    }
    RelianceGraph { nodes: rules.labels(), pos_edges, neg_edges }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    fn rules(text: &str) -> RuleSet {
        parse_program(text).unwrap().rules
    }

    #[test]
    fn constants_in_rules_join_the_universe() {
        let rs = rules("a: P(x) -> Q(x).\nb: Q(c) -> R(c).");
        assert!(positively_relies(&rs.rules()[0], &rs.rules()[1]));
    }

    #[test]
    fn satisfied_head_blocks_positive_reliance() {
        // b's head is a's body, so D already holds it whenever a fires
        let rs = rules("a: P(x) -> Q(x).\nb: Q(x), P(x) -> P(x).");
        assert!(!positively_relies(&rs.rules()[0], &rs.rules()[1]));
    }

    #[test]
    fn self_negative_reliance() {
        let rs = rules("a: P(x), not Q(x) -> Q(x).");
        assert!(negatively_relies(&rs.rules()[0], &rs.rules()[0]));
        assert!(!positively_relies(&rs.rules()[0], &rs.rules()[0]));
    }

    #[test]
    fn existential_cycle() {
        let rs = rules("a: P(x) -> exists y . R(x, y).\nb: R(x, y) -> P(y).");
        let g = reliance_graph(&rs, 1);
        assert!(g.pos_edges.contains(&(Label::new("a"), Label::new("b"))));
        assert!(g.pos_edges.contains(&(Label::new("b"), Label::new("a"))));
    }

    #[test]
    fn null_reaches_second_rule() {
        // b needs y bound to the null a introduces
        let rs = rules("a: P(x) -> exists y . R(x, y), S(y).\nb: R(x, y), S(y) -> T(x).");
        assert!(positively_relies(&rs.rules()[0], &rs.rules()[1]));
    }

    #[test]
    fn no_edges_for_single_rule() {
        let g = reliance_graph(&rules("r1: P(x) -> Q(x)."), 1);
        assert!(g.is_empty());
    }
}
