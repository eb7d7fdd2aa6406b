use std::collections::HashMap;

use super::atom::Atom;
use super::error::ModelError;
use super::term::{Name, Term};

/// Partial map from variable names to terms.
pub type Substitution = HashMap<Name, Term>;

/// Extends `binding` minimally so that `pattern` maps onto the ground `fact`.
pub fn match_atom(pattern: &Atom, fact: &Atom, binding: &Substitution) -> Option<Substitution> {
    if pattern.pred != fact.pred {
        return None;
    }
    let mut out = binding.clone();
    for (p, f) in pattern.args.iter().zip(&fact.args) {
        if !match_term(p, f, &mut out) {
            return None;
        }
    }
    Some(out)
}

fn match_term(pattern: &Term, fact: &Term, binding: &mut Substitution) -> bool {
    match pattern {
        Term::Var(v) => match binding.get(v) {
            Some(bound) => bound == fact,
            None => {
                binding.insert(v.clone(), fact.clone());
                true
            }
        },
        Term::Const(_) => pattern == fact,
        Term::Skolem(p) => match fact {
            Term::Skolem(f) if p.func == f.func && p.args.len() == f.args.len() => {
                p.args.iter().zip(&f.args).all(|(a, b)| match_term(a, b, binding))
            }
            _ => false,
        },
    }
}

pub fn apply_term(t: &Term, binding: &Substitution, require_ground: bool) -> Result<Term, ModelError> {
    match t {
        Term::Var(v) => match binding.get(v) {
            Some(b) => Ok(b.clone()),
            None if require_ground => Err(ModelError::UnboundVariable(v.to_string())),
            None => Ok(t.clone()),
        },
        Term::Const(_) => Ok(t.clone()),
        Term::Skolem(s) => {
            let args = s.args.iter().map(|a| apply_term(a, binding, require_ground)).collect::<Result<_, _>>()?;
            Ok(Term::skolem(s.func.clone(), args))
        }
    }
}

/// Replaces bound variables in `atom`; with `require_ground`, an unbound variable is an error.
pub fn apply_substitution(atom: &Atom, binding: &Substitution, require_ground: bool) -> Result<Atom, ModelError> {
    let args = atom.args.iter().map(|t| apply_term(t, binding, require_ground)).collect::<Result<_, _>>()?;
    Ok(Atom { pred: atom.pred.clone(), args })
}

pub fn apply_all(atoms: &[Atom], binding: &Substitution, require_ground: bool) -> Result<Vec<Atom>, ModelError> {
    atoms.iter().map(|a| apply_substitution(a, binding, require_ground)).collect()
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use proptest::prelude::*;

    use super::*;
    use crate::model::{Label, SkolemFn};

    fn c(s: &str) -> Term {
        Term::constant(s)
    }
    fn v(s: &str) -> Term {
        Term::var(s)
    }

    #[test]
    fn single_variable_match() {
        let m = match_atom(&Atom::new("Bat", vec![v("x")]), &Atom::new("Bat", vec![c("a")]), &Substitution::new()).unwrap();
        assert_eq!(m.len(), 1);
        assert_eq!(m[&Arc::<str>::from("x")], c("a"));
    }

    #[test]
    fn repeated_variable_clash() {
        let p = Atom::new("LiveIn", vec![v("x"), v("x")]);
        let f = Atom::new("LiveIn", vec![c("a"), c("b")]);
        assert!(match_atom(&p, &f, &Substitution::new()).is_none());
    }

    #[test]
    fn match_against_skolem_extends_binding() {
        let sk = Term::skolem(SkolemFn { rule: Label::new("r2"), var: Arc::from("y") }, vec![c("a")]);
        let p = Atom::new("LiveIn", vec![v("x"), v("y")]);
        let f = Atom::new("LiveIn", vec![c("a"), sk.clone()]);
        let mut b = Substitution::new();
        b.insert(Arc::from("x"), c("a"));
        let m = match_atom(&p, &f, &b).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m[&Arc::<str>::from("y")], sk);
    }

    #[test]
    fn apply_examples() {
        let mut b = Substitution::new();
        b.insert(Arc::from("x"), c("a"));
        let got = apply_substitution(&Atom::new("CanFly", vec![v("x")]), &b, true).unwrap();
        assert_eq!(got, Atom::new("CanFly", vec![c("a")]));
        let ground = Atom::new("Bat", vec![c("a")]);
        assert_eq!(apply_substitution(&ground, &Substitution::new(), true).unwrap(), ground);
        let mut only_y = Substitution::new();
        only_y.insert(Arc::from("y"), c("a"));
        assert_eq!(
            apply_substitution(&Atom::new("Trogloxene", vec![v("x")]), &only_y, true),
            Err(ModelError::UnboundVariable("x".into()))
        );
    }

    fn pattern_and_fact() -> impl Strategy<Value = (Atom, Atom)> {
        let term = prop_oneof![
            (0..3usize).prop_map(|i| Term::var(["x", "y", "z"][i])),
            (0..3usize).prop_map(|i| Term::constant(["a", "b", "c"][i])),
        ];
        (prop::collection::vec(term, 0..4), prop::collection::vec(0..3usize, 4)).prop_map(|(args, consts)| {
            let fact_args = args
                .iter()
                .enumerate()
                .map(|(i, t)| match t {
                    Term::Var(_) => Term::constant(["a", "b", "c"][consts[i]]),
                    other => other.clone(),
                })
                .collect();
            (Atom::new("R", args), Atom::new("R", fact_args))
        })
    }

    proptest! {
        #[test]
        fn match_then_apply_reproduces_fact((pattern, fact) in pattern_and_fact()) {
            if let Some(b) = match_atom(&pattern, &fact, &Substitution::new()) {
                prop_assert_eq!(apply_substitution(&pattern, &b, true).unwrap(), fact);
            }
        }
    }
}
