use std::fmt;

use crate::model::{Atom, Label, Name, Rule, RuleSet, SkolemFn, Term};

/// A rule after skolemization: existential variables replaced by skolem
/// terms over the rule's frontier, read as a normal logic program rule.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SkolemRule {
    pub label: Label,
    pub body_pos: Vec<Atom>,
    pub body_neg: Vec<Atom>,
    /// One or more head atoms sharing the body; `[⊥]` for constraints.
    pub head: Vec<Atom>,
}

impl SkolemRule {
    pub fn is_constraint(&self) -> bool {
        self.head.len() == 1 && self.head[0].is_falsum()
    }

    /// Renames every variable through `f`; skolem function symbols are kept.
    pub fn rename_vars(&self, f: &dyn Fn(&str) -> String) -> SkolemRule {
        fn go(t: &Term, f: &dyn Fn(&str) -> String) -> Term {
            match t {
                Term::Var(v) => Term::var(f(v)),
                Term::Const(_) => t.clone(),
                Term::Skolem(s) => Term::skolem(s.func.clone(), s.args.iter().map(|a| go(a, f)).collect()),
            }
        }
        let map = |atoms: &[Atom]| -> Vec<Atom> {
            atoms.iter().map(|a| Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| go(t, f)).collect() }).collect()
        };
        SkolemRule {
            label: self.label.clone(),
            body_pos: map(&self.body_pos),
            body_neg: map(&self.body_neg),
            head: map(&self.head),
        }
    }

    pub fn vars(&self) -> Vec<Name> {
        let mut out = Vec::new();
        for a in self.body_pos.iter().chain(&self.body_neg).chain(&self.head) {
            a.collect_vars(&mut out);
        }
        out
    }
}

impl fmt::Display for SkolemRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<String> = self.head.iter().map(Atom::to_string).collect();
        write!(f, "{}", head.join(", "))?;
        let body: Vec<String> = self
            .body_pos
            .iter()
            .map(Atom::to_string)
            .chain(self.body_neg.iter().map(|a| format!("not {a}")))
            .collect();
        if !body.is_empty() {
            write!(f, " <- {}", body.join(", "))?;
        }
        Ok(())
    }
}

/// `sk(r)`: each existential `z` becomes `f_<label>_z(frontier)`.
pub fn skolemize_rule(rule: &Rule) -> SkolemRule {
    let frontier: Vec<Term> = rule.frontier().into_iter().map(Term::Var).collect();
    let replace = |t: &Term| -> Term {
        match t {
            Term::Var(v) if rule.exist_vars().contains(v) => {
                Term::skolem(SkolemFn { rule: rule.label().clone(), var: v.clone() }, frontier.clone())
            }
            other => other.clone(),
        }
    };
    let head = rule
        .head()
        .iter()
        .map(|a| Atom { pred: a.pred.clone(), args: a.args.iter().map(replace).collect() })
        .collect();
    SkolemRule {
        label: rule.label().clone(),
        body_pos: rule.body_pos().to_vec(),
        body_neg: rule.body_neg().to_vec(),
        head,
    }
}

pub fn skolemize(rules: &RuleSet) -> Vec<SkolemRule> {
    rules.iter().map(skolemize_rule).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_program;

    #[test]
    fn existential_rule_gets_frontier_skolem() {
        let doc = parse_program("r2: Bat(x) -> exists y . LiveIn(x, y), Cave(y).").unwrap();
        let sk = skolemize_rule(&doc.rules.rules()[0]);
        assert_eq!(sk.to_string(), "LiveIn(x, f_r2_y(x)), Cave(f_r2_y(x)) <- Bat(x)");
    }

    #[test]
    fn plain_rule_unchanged() {
        let doc = parse_program("r4: Mammal(x), not CanFly(x) -> CanNotFly(x).").unwrap();
        let r = &doc.rules.rules()[0];
        let sk = skolemize_rule(r);
        assert_eq!(sk.body_pos, r.body_pos());
        assert_eq!(sk.body_neg, r.body_neg());
        assert_eq!(sk.head, r.head());
    }

    #[test]
    fn skolem_functions_are_per_rule() {
        let doc = parse_program("a: P(x) -> exists y . R(x, y).\nb: P(x) -> exists y . R(x, y).").unwrap();
        let sks = skolemize(&doc.rules);
        assert_ne!(sks[0].head, sks[1].head);
        let f = |s: &SkolemRule| match &s.head[0].args[1] {
            Term::Skolem(t) => t.func.clone(),
            _ => unreachable!(),
        };
        assert_ne!(f(&sks[0]), f(&sks[1]));
    }
}
