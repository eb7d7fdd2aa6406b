use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;

use super::atom::{Atom, Predicate};
use super::error::ModelError;
use super::term::{Label, Name};

/// A normal existential rule `B⁺, not B⁻ -> ∃z. H`. Constraints have head `[⊥]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Rule {
    label: Label,
    body_pos: Vec<Atom>,
    body_neg: Vec<Atom>,
    head: Vec<Atom>,
    exist_vars: Vec<Name>,
    univ_vars: Vec<Name>,
}

fn dedup(atoms: Vec<Atom>) -> Vec<Atom> {
    let mut out: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        if !out.contains(&a) {
            out.push(a);
        }
    }
    out
}

impl Rule {
    pub fn new(
        label: Label,
        body_pos: Vec<Atom>,
        body_neg: Vec<Atom>,
        head: Vec<Atom>,
        exist_vars: Vec<Name>,
    ) -> Result<Rule, ModelError> {
        let body_pos = dedup(body_pos);
        let body_neg = dedup(body_neg);
        let head = dedup(head);
        let mut exist: Vec<Name> = Vec::new();
        for v in exist_vars {
            if !exist.contains(&v) {
                exist.push(v);
            }
        }

        if head.is_empty() {
            return Err(ModelError::EmptyHead { rule: label });
        }
        let falsum_in_head = head.iter().any(Atom::is_falsum);
        if (falsum_in_head && head.len() > 1)
            || body_pos.iter().chain(&body_neg).any(Atom::is_falsum)
        {
            return Err(ModelError::MisplacedFalsum { rule: label });
        }
        if body_pos.iter().chain(&body_neg).chain(&head).any(Atom::has_skolem) {
            return Err(ModelError::FunctionTermInRule { rule: label });
        }

        let mut body_vars = Vec::new();
        for a in body_pos.iter().chain(&body_neg) {
            a.collect_vars(&mut body_vars);
        }
        let mut head_vars = Vec::new();
        for a in &head {
            a.collect_vars(&mut head_vars);
        }
        for z in &exist {
            if body_vars.contains(z) {
                return Err(ModelError::ExistentialInBody { rule: label, var: z.to_string() });
            }
            if !head_vars.contains(z) {
                return Err(ModelError::UnusedExistential { rule: label, var: z.to_string() });
            }
        }
        let mut pos_vars = Vec::new();
        for a in &body_pos {
            a.collect_vars(&mut pos_vars);
        }
        let mut univ = body_vars;
        for v in head_vars {
            if !exist.contains(&v) && !univ.contains(&v) {
                univ.push(v);
            }
        }
        if let Some(v) = univ.iter().find(|v| !pos_vars.contains(v)) {
            return Err(ModelError::UnsafeVariable { rule: label, var: v.to_string() });
        }

        Ok(Rule { label, body_pos, body_neg, head, exist_vars: exist, univ_vars: univ })
    }

    pub fn constraint(label: Label, body_pos: Vec<Atom>, body_neg: Vec<Atom>) -> Result<Rule, ModelError> {
        Rule::new(label, body_pos, body_neg, vec![Atom::falsum()], Vec::new())
    }

    pub fn label(&self) -> &Label {
        &self.label
    }

    pub fn body_pos(&self) -> &[Atom] {
        &self.body_pos
    }

    pub fn body_neg(&self) -> &[Atom] {
        &self.body_neg
    }

    pub fn head(&self) -> &[Atom] {
        &self.head
    }

    pub fn exist_vars(&self) -> &[Name] {
        &self.exist_vars
    }

    pub fn univ_vars(&self) -> &[Name] {
        &self.univ_vars
    }

    pub fn is_constraint(&self) -> bool {
        self.head.len() == 1 && self.head[0].is_falsum()
    }

    pub fn is_existential(&self) -> bool {
        !self.exist_vars.is_empty()
    }

    /// Universal variables that also occur in the head.
    pub fn frontier(&self) -> Vec<Name> {
        let mut head_vars = Vec::new();
        for a in &self.head {
            a.collect_vars(&mut head_vars);
        }
        self.univ_vars.iter().filter(|v| head_vars.contains(v)).cloned().collect()
    }

    pub fn with_label(&self, label: Label) -> Rule {
        Rule { label, ..self.clone() }
    }

    /// Consistently renames every variable through `f`.
    pub fn rename_vars(&self, f: impl Fn(&str) -> String) -> Rule {
        use super::term::Term;
        fn go(t: &Term, f: &dyn Fn(&str) -> String) -> Term {
            match t {
                Term::Var(v) => Term::var(f(v)),
                Term::Const(_) => t.clone(),
                Term::Skolem(s) => {
                    Term::skolem(s.func.clone(), s.args.iter().map(|a| go(a, f)).collect())
                }
            }
        }
        let map = |atoms: &[Atom]| -> Vec<Atom> {
            atoms
                .iter()
                .map(|a| Atom { pred: a.pred.clone(), args: a.args.iter().map(|t| go(t, &f)).collect() })
                .collect()
        };
        Rule {
            label: self.label.clone(),
            body_pos: map(&self.body_pos),
            body_neg: map(&self.body_neg),
            head: map(&self.head),
            exist_vars: self.exist_vars.iter().map(|v| Arc::from(f(v))).collect(),
            univ_vars: self.univ_vars.iter().map(|v| Arc::from(f(v))).collect(),
        }
    }

    pub fn predicates(&self) -> impl Iterator<Item = &Predicate> {
        self.body_pos.iter().chain(&self.body_neg).chain(&self.head).map(|a| &a.pred)
    }
}

fn write_atoms(f: &mut fmt::Formatter<'_>, atoms: &[Atom], neg: bool, first: &mut bool) -> fmt::Result {
    for a in atoms {
        if !*first {
            f.write_str(", ")?;
        }
        *first = false;
        if neg {
            f.write_str("not ")?;
        }
        write!(f, "{a}")?;
    }
    Ok(())
}

impl fmt::Display for Rule {
    /// Surface syntax, re-parseable: `label: body -> head.`
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        let mut first = true;
        write_atoms(f, &self.body_pos, false, &mut first)?;
        write_atoms(f, &self.body_neg, true, &mut first)?;
        f.write_str(if first { "-> " } else { " -> " })?;
        if !self.exist_vars.is_empty() {
            f.write_str("exists ")?;
            for (i, z) in self.exist_vars.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                f.write_str(z)?;
            }
            f.write_str(" . ")?;
        }
        let mut first = true;
        write_atoms(f, &self.head, false, &mut first)?;
        f.write_str(".")
    }
}

/// A finite rule set with unique labels, kept in declaration order.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct RuleSet {
    rules: Vec<Rule>,
    index: HashMap<Label, usize>,
}

impl RuleSet {
    pub fn new(rules: Vec<Rule>) -> Result<RuleSet, ModelError> {
        let mut index = HashMap::with_capacity(rules.len());
        for (i, r) in rules.iter().enumerate() {
            if index.insert(r.label.clone(), i).is_some() {
                return Err(ModelError::DuplicateLabel(r.label.clone()));
            }
        }
        Ok(RuleSet { rules, index })
    }

    pub fn empty() -> RuleSet {
        RuleSet::default()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rule> {
        self.rules.iter()
    }

    pub fn get(&self, label: &Label) -> Option<&Rule> {
        self.index.get(label).map(|&i| &self.rules[i])
    }

    pub fn index_of(&self, label: &Label) -> Option<usize> {
        self.index.get(label).copied()
    }

    pub fn labels(&self) -> Vec<Label> {
        self.rules.iter().map(|r| r.label.clone()).collect()
    }

    /// Bit mask over rule positions for the given labels.
    pub fn mask_of<'a>(&self, labels: impl IntoIterator<Item = &'a Label>) -> Result<FixedBitSet, ModelError> {
        let mut m = FixedBitSet::with_capacity(self.len());
        for l in labels {
            let i = self.index_of(l).ok_or_else(|| ModelError::UnknownLabel(l.clone()))?;
            m.insert(i);
        }
        Ok(m)
    }

    pub fn full_mask(&self) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.len());
        m.insert_range(..);
        m
    }

    /// Sorted labels of the rules selected by `mask`.
    pub fn labels_of(&self, mask: &FixedBitSet) -> Vec<Label> {
        let mut v: Vec<Label> = mask.ones().map(|i| self.rules[i].label.clone()).collect();
        v.sort();
        v
    }

    /// The sub-rule-set selected by `mask`, in declaration order.
    pub fn restrict(&self, mask: &FixedBitSet) -> RuleSet {
        let rules: Vec<Rule> = mask.ones().map(|i| self.rules[i].clone()).collect();
        RuleSet::new(rules).expect("labels of a subset stay unique")
    }
}

impl<'a> IntoIterator for &'a RuleSet {
    type Item = &'a Rule;
    type IntoIter = std::slice::Iter<'a, Rule>;

    fn into_iter(self) -> Self::IntoIter {
        self.rules.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Term;

    fn a(p: &str, args: &[&str]) -> Atom {
        Atom::new(p, args.iter().map(Term::var).collect())
    }

    #[test]
    fn unsafe_variable_rejected() {
        let r = Rule::new(Label::new("bad"), vec![], vec![a("P", &["x"])], vec![a("Q", &["x"])], vec![]);
        assert!(matches!(r, Err(ModelError::UnsafeVariable { .. })));
    }

    #[test]
    fn existential_must_stay_in_head() {
        let r = Rule::new(
            Label::new("r"),
            vec![a("P", &["x", "y"])],
            vec![],
            vec![a("Q", &["y"])],
            vec![Arc::from("y")],
        );
        assert!(matches!(r, Err(ModelError::ExistentialInBody { .. })));
    }

    #[test]
    fn frontier_and_universals() {
        let r = Rule::new(
            Label::new("r2"),
            vec![a("Bat", &["x"])],
            vec![],
            vec![a("LiveIn", &["x", "y"]), a("Cave", &["y"])],
            vec![Arc::from("y")],
        )
        .unwrap();
        assert_eq!(r.univ_vars(), &[Arc::from("x")]);
        assert_eq!(r.frontier(), vec![Arc::<str>::from("x")]);
        assert!(r.is_existential());
        assert_eq!(r.to_string(), "r2: Bat(x) -> exists y . LiveIn(x, y), Cave(y).");
    }

    #[test]
    fn duplicate_labels_rejected() {
        let r = Rule::new(Label::new("r"), vec![a("P", &["x"])], vec![], vec![a("Q", &["x"])], vec![]).unwrap();
        assert_eq!(RuleSet::new(vec![r.clone(), r]).unwrap_err(), ModelError::DuplicateLabel(Label::new("r")));
    }
}
