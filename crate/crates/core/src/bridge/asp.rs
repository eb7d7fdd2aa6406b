use std::collections::HashMap;
use std::fmt::Write as _;

use super::BridgeError;
use crate::engine::SkolemRule;
use crate::model::{is_identifier, Atom, Database, Name, Predicate, SkolemFn, Term};

/// Source names behind the identifiers of an emitted program.
#[derive(Clone, Debug, Default)]
pub struct Mangling {
    preds: HashMap<(String, usize), Predicate>,
    consts: HashMap<String, Name>,
    funcs: HashMap<(String, usize), SkolemFn>,
}

/// An ASP program together with the table needed to read its answer sets.
#[derive(Clone, Debug)]
pub struct AspProgram {
    pub text: String,
    pub mangling: Mangling,
}

/// Lower-cases the first letter after any leading underscores.
pub fn mangle_symbol(name: &str) -> String {
    let mut out = String::with_capacity(name.len());
    let mut done = false;
    for c in name.chars() {
        if !done && c != '_' {
            out.extend(c.to_lowercase());
            done = true;
        } else {
            out.push(c);
        }
    }
    out
}

/// Upper-cases the first letter of a variable name.
pub fn mangle_variable(name: &str) -> String {
    let mut c = name.chars();
    match c.next() {
        Some(f) => f.to_uppercase().chain(c).collect(),
        None => String::new(),
    }
}

fn is_int(c: &str) -> bool {
    c.parse::<i64>().is_ok_and(|n| n.to_string() == c)
}

fn asp_string(c: &str) -> String {
    let mut s = String::from("\"");
    for ch in c.chars() {
        match ch {
            '"' => s.push_str("\\\""),
            '\\' => s.push_str("\\\\"),
            '\n' => s.push_str("\\n"),
            _ => s.push(ch),
        }
    }
    s.push('"');
    s
}

impl Mangling {
    fn predicate(&mut self, p: &Predicate) -> Result<String, BridgeError> {
        let target = mangle_symbol(&p.name);
        match self.preds.get(&(target.clone(), p.arity)) {
            Some(q) if q != p => Err(BridgeError::Collision { first: q.name.to_string(), second: p.name.to_string(), target }),
            Some(_) => Ok(target),
            None => {
                self.preds.insert((target.clone(), p.arity), p.clone());
                Ok(target)
            }
        }
    }

    fn constant(&mut self, c: &Name) -> Result<String, BridgeError> {
        if is_int(c) {
            return Ok(c.to_string());
        }
        if !is_identifier(c) {
            return Ok(asp_string(c));
        }
        let target = mangle_symbol(c);
        match self.consts.get(&target) {
            Some(d) if d != c => Err(BridgeError::Collision { first: d.to_string(), second: c.to_string(), target }),
            Some(_) => Ok(target),
            None => {
                self.consts.insert(target.clone(), c.clone());
                Ok(target)
            }
        }
    }

    fn function(&mut self, f: &SkolemFn, arity: usize) -> Result<String, BridgeError> {
        let target = mangle_symbol(&f.to_string());
        match self.funcs.get(&(target.clone(), arity)) {
            Some(g) if g != f => Err(BridgeError::Collision { first: g.to_string(), second: f.to_string(), target }),
            Some(_) => Ok(target),
            None => {
                if self.consts.contains_key(&target) && arity == 0 {
                    return Err(BridgeError::Collision {
                        first: self.consts[&target].to_string(),
                        second: f.to_string(),
                        target,
                    });
                }
                self.funcs.insert((target.clone(), arity), f.clone());
                Ok(target)
            }
        }
    }

    fn term(&mut self, t: &Term) -> Result<String, BridgeError> {
        match t {
            Term::Const(c) => self.constant(c),
            Term::Var(v) => Ok(mangle_variable(v)),
            Term::Skolem(s) => {
                let name = self.function(&s.func, s.args.len())?;
                let args = s.args.iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                Ok(format!("{name}({})", args.join(", ")))
            }
        }
    }

    fn atom(&mut self, a: &Atom) -> Result<String, BridgeError> {
        let p = self.predicate(&a.pred)?;
        if a.args.is_empty() {
            return Ok(p);
        }
        let args = a.args.iter().map(|t| self.term(t)).collect::<Result<Vec<_>, _>>()?;
        Ok(format!("{p}({})", args.join(", ")))
    }

    pub fn demangle_predicate(&self, name: &str, arity: usize) -> Option<&Predicate> {
        self.preds.get(&(name.to_string(), arity))
    }

    pub fn demangle_constant(&self, name: &str) -> Option<&Name> {
        self.consts.get(name)
    }

    pub fn demangle_function(&self, name: &str, arity: usize) -> Option<&SkolemFn> {
        self.funcs.get(&(name.to_string(), arity))
    }
}

/// Writes `D ∪ S` as a ground-free ASP program: facts, one rule per head atom,
/// and `:- body.` for constraints.
pub fn emit_asp(db: &Database, rules: &[SkolemRule]) -> Result<AspProgram, BridgeError> {
    let mut m = Mangling::default();
    let mut text = String::new();
    for f in db.iter() {
        let _ = writeln!(text, "{}.", m.atom(f)?);
    }
    for r in rules {
        let mut body = Vec::new();
        for a in &r.body_pos {
            body.push(m.atom(a)?);
        }
        for a in &r.body_neg {
            body.push(format!("not {}", m.atom(a)?));
        }
        let body = body.join(", ");
        if r.is_constraint() {
            let _ = writeln!(text, ":- {body}.");
            continue;
        }
        for h in &r.head {
            let h = m.atom(h)?;
            if body.is_empty() {
                let _ = writeln!(text, "{h}.");
            } else {
                let _ = writeln!(text, "{h} :- {body}.");
            }
        }
    }
    Ok(AspProgram { text, mangling: m })
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;
    use crate::engine::skolemize;
    use crate::syntax::{parse_database, parse_program};

    const EX1: &str = include_str!("../../../../data/ex1.rules");

    #[test]
    fn example_rules() {
        let doc = parse_program(EX1).unwrap();
        let db = parse_database("Bat(a). Mammal(a).").unwrap();
        let p = emit_asp(&db, &skolemize(&doc.rules)).unwrap();
        let lines: Vec<&str> = p.text.lines().collect();
        assert!(lines.contains(&"canNotFly(X) :- mammal(X), not canFly(X)."));
        assert!(lines.contains(&":- bird(X), mammal(X)."));
        assert!(lines.contains(&"liveIn(X, f_r2_y(X)) :- bat(X)."));
        assert!(lines.contains(&"cave(f_r2_y(X)) :- bat(X)."));
        assert!(lines.contains(&"bat(a)."));
    }

    #[test]
    fn case_collision_is_reported() {
        let doc = parse_program("Bird(x) -> bird(x).").unwrap();
        let err = emit_asp(&Database::default(), &skolemize(&doc.rules)).unwrap_err();
        assert!(matches!(err, BridgeError::Collision { .. }));
    }

    #[test]
    fn odd_constants() {
        let db = parse_database("P(\"two words\"). P(7). P(Alice).").unwrap();
        let p = emit_asp(&db, &[]).unwrap();
        assert_eq!(p.text, "p(7).\np(alice).\np(\"two words\").\n");
    }

    proptest! {
        #[test]
        fn mangled_names_map_back(names in prop::collection::vec("_{0,2}[A-Za-z][A-Za-z0-9_']{0,5}", 1..8)) {
            let mut m = Mangling::default();
            for n in &names {
                let c: Name = n.as_str().into();
                if let Ok(t) = m.constant(&c) {
                    prop_assert_eq!(m.demangle_constant(&t), Some(&c));
                }
                let p = Predicate::new(n, 1);
                if let Ok(t) = m.predicate(&p) {
                    prop_assert_eq!(m.demangle_predicate(&t, 1), Some(&p));
                }
            }
        }
    }
}
