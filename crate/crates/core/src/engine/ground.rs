use std::collections::{HashMap, HashSet};
use std::fmt;

use fixedbitset::FixedBitSet;

use super::{EngineConfig, EngineError, SkolemRule};
use crate::model::{apply_substitution, match_atom, Atom, Database, Instance, Predicate, Substitution, Term};

pub type AtomId = u32;

/// A ground rule instance with a single head atom. Atoms are ids into the
/// owning [`GroundProgram`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundRule {
    /// Index of the rule this instance came from.
    pub source: usize,
    pub head: AtomId,
    pub pos: Vec<AtomId>,
    pub neg: Vec<AtomId>,
}

/// The relevant grounding of a skolemized program over a database.
#[derive(Clone, Debug)]
pub struct GroundProgram {
    atoms: Vec<Atom>,
    lookup: HashMap<Atom, AtomId>,
    rules: Vec<GroundRule>,
    base: Vec<AtomId>,
    closure: FixedBitSet,
    neg_atoms: Vec<AtomId>,
    falsum: Option<AtomId>,
}

impl GroundProgram {
    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn atom(&self, id: AtomId) -> &Atom {
        &self.atoms[id as usize]
    }

    pub fn lookup(&self, atom: &Atom) -> Option<AtomId> {
        self.lookup.get(atom).copied()
    }

    /// Every atom occurring anywhere in the program or the database.
    pub fn atom_universe(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn rules(&self) -> &[GroundRule] {
        &self.rules
    }

    pub fn base_facts(&self) -> &[AtomId] {
        &self.base
    }

    /// Atoms of the positive closure, `⊥` included when derivable.
    pub fn closure(&self) -> Instance {
        self.instance(&self.closure, true)
    }

    /// Atoms occurring under negation, sorted by id.
    pub fn neg_atoms(&self) -> &[AtomId] {
        &self.neg_atoms
    }

    pub fn falsum(&self) -> Option<AtomId> {
        self.falsum
    }

    /// Converts an atom mask to an instance, dropping `⊥` unless asked not to.
    pub fn instance(&self, mask: &FixedBitSet, keep_falsum: bool) -> Instance {
        Instance::from_ground(
            mask.ones()
                .filter(|&i| keep_falsum || Some(i as AtomId) != self.falsum)
                .map(|i| self.atoms[i].clone())
                .collect(),
        )
    }

    /// Atom mask of an instance; atoms unknown to the program are ignored.
    pub fn mask(&self, inst: &Instance) -> FixedBitSet {
        let mut m = FixedBitSet::with_capacity(self.atoms.len());
        for a in inst.iter() {
            if let Some(id) = self.lookup(a) {
                m.insert(id as usize);
            }
        }
        m
    }

    pub fn display_rule(&self, r: &GroundRule) -> String {
        let mut body: Vec<String> = r.pos.iter().map(|&a| self.atom(a).to_string()).collect();
        body.extend(r.neg.iter().map(|&a| format!("not {}", self.atom(a))));
        if body.is_empty() {
            format!("{}.", self.atom(r.head))
        } else {
            format!("{} <- {}.", self.atom(r.head), body.join(", "))
        }
    }
}

impl fmt::Display for GroundProgram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.base {
            writeln!(f, "{}.", self.atom(b))?;
        }
        for r in &self.rules {
            writeln!(f, "{}", self.display_rule(r))?;
        }
        Ok(())
    }
}

/// Closure atoms indexed for joins. `round[id]` is the semi-naive round in
/// which the atom entered the closure.
struct Store {
    atoms: Vec<Atom>,
    lookup: HashMap<Atom, AtomId>,
    round: Vec<u32>,
    by_pred: HashMap<Predicate, Vec<AtomId>>,
    by_arg: HashMap<(Predicate, usize, Term), Vec<AtomId>>,
    closure_len: usize,
}

const NOT_DERIVED: u32 = u32::MAX;

impl Store {
    fn intern(&mut self, a: Atom) -> AtomId {
        if let Some(&id) = self.lookup.get(&a) {
            return id;
        }
        let id = self.atoms.len() as AtomId;
        self.lookup.insert(a.clone(), id);
        self.atoms.push(a);
        self.round.push(NOT_DERIVED);
        id
    }

    /// Adds an atom to the closure; returns whether it was new there.
    fn derive(&mut self, a: Atom, round: u32) -> (AtomId, bool) {
        let id = self.intern(a);
        if self.round[id as usize] != NOT_DERIVED {
            return (id, false);
        }
        self.round[id as usize] = round;
        self.closure_len += 1;
        let atom = &self.atoms[id as usize];
        self.by_pred.entry(atom.pred.clone()).or_default().push(id);
        for (i, t) in atom.args.iter().enumerate() {
            self.by_arg.entry((atom.pred.clone(), i, t.clone())).or_default().push(id);
        }
        (id, true)
    }

    /// Closure atoms that could match `pattern` under `theta`.
    fn candidates(&self, pattern: &Atom, theta: &Substitution) -> &[AtomId] {
        let mut best: Option<&Vec<AtomId>> = None;
        for (i, t) in pattern.args.iter().enumerate() {
            let key = match t {
                Term::Var(v) => match theta.get(v) {
                    Some(b) => b.clone(),
                    None => continue,
                },
                Term::Const(_) => t.clone(),
                Term::Skolem(_) => continue,
            };
            match self.by_arg.get(&(pattern.pred.clone(), i, key)) {
                None => return &[],
                Some(l) if best.is_none_or(|b| l.len() < b.len()) => best = Some(l),
                Some(_) => {}
            }
        }
        match best.or_else(|| self.by_pred.get(&pattern.pred)) {
            Some(l) => l,
            None => &[],
        }
    }
}

#[derive(Clone, Copy)]
enum Window {
    Old,
    Delta,
    All,
}

impl Window {
    fn admits(self, round: u32, current: u32) -> bool {
        if round == NOT_DERIVED {
            return false;
        }
        match self {
            Window::Old => round + 1 < current,
            Window::Delta => round + 1 == current,
            Window::All => round < current,
        }
    }
}

/// Grounds `program` over the positive closure of `db`. Rule instances are
/// emitted for every positive body match inside the closure; negative bodies
/// are carried along but never consulted.
pub fn ground_relevant(program: &[SkolemRule], db: &Database, cfg: &EngineConfig) -> Result<GroundProgram, EngineError> {
    ground_masked(program, db, cfg, None)
}

pub(crate) fn ground_masked(
    program: &[SkolemRule],
    db: &Database,
    cfg: &EngineConfig,
    mask: Option<&FixedBitSet>,
) -> Result<GroundProgram, EngineError> {
    let mut store = Store {
        atoms: Vec::new(),
        lookup: HashMap::new(),
        round: Vec::new(),
        by_pred: HashMap::new(),
        by_arg: HashMap::new(),
        closure_len: 0,
    };
    let mut base = Vec::with_capacity(db.len());
    for f in db.iter() {
        base.push(store.derive(f.clone(), 0).0);
    }
    let active: Vec<usize> = (0..program.len()).filter(|&i| mask.is_none_or(|m| m.contains(i))).collect();
    let mut seen: HashSet<GroundRule> = HashSet::new();
    let mut rules: Vec<GroundRule> = Vec::new();
    let mut round: u32 = 1;
    loop {
        let mut produced: Vec<(usize, Substitution)> = Vec::new();
        for &ri in &active {
            let r = &program[ri];
            if r.body_pos.is_empty() {
                if round == 1 {
                    produced.push((ri, Substitution::new()));
                }
                continue;
            }
            for d in 0..r.body_pos.len() {
                let windows: Vec<Window> = (0..r.body_pos.len())
                    .map(|j| match j.cmp(&d) {
                        std::cmp::Ordering::Less => Window::Old,
                        std::cmp::Ordering::Equal => Window::Delta,
                        std::cmp::Ordering::Greater => Window::All,
                    })
                    .collect();
                // start the join from the delta atom
                let mut order: Vec<usize> = vec![d];
                order.extend((0..r.body_pos.len()).filter(|&j| j != d));
                join(&store, r, &order, &windows, 0, round, &mut Substitution::new(), &mut |t| {
                    produced.push((ri, t.clone()))
                });
            }
        }
        let mut grew = false;
        for (ri, theta) in produced {
            let r = &program[ri];
            let ground = |a: &Atom| apply_substitution(a, &theta, true).expect("safe rules bind every variable");
            let pos: Vec<Atom> = r.body_pos.iter().map(ground).collect();
            let neg: Vec<Atom> = r.body_neg.iter().map(ground).collect();
            let pos_ids: Vec<AtomId> = pos.into_iter().map(|a| store.intern(a)).collect();
            let neg_ids: Vec<AtomId> = neg.into_iter().map(|a| store.intern(a)).collect();
            for h in &r.head {
                let h = ground(h);
                for t in &h.args {
                    if t.depth() > cfg.max_skolem_depth {
                        return Err(EngineError::DepthLimitExceeded {
                            term: t.to_string(),
                            rule: r.label.to_string(),
                            depth: cfg.max_skolem_depth,
                        });
                    }
                }
                let (hid, new) = store.derive(h, round);
                grew |= new;
                let mut pos = pos_ids.clone();
                pos.sort_unstable();
                pos.dedup();
                let mut neg = neg_ids.clone();
                neg.sort_unstable();
                neg.dedup();
                let gr = GroundRule { source: ri, head: hid, pos, neg };
                if seen.insert(gr.clone()) {
                    rules.push(gr);
                }
            }
            if store.atoms.len() > cfg.max_ground_atoms {
                return Err(EngineError::AtomCapExceeded(cfg.max_ground_atoms));
            }
        }
        if !grew {
            break;
        }
        round += 1;
    }
    let n = store.atoms.len();
    let mut closure = FixedBitSet::with_capacity(n);
    for (i, &r) in store.round.iter().enumerate() {
        if r != NOT_DERIVED {
            closure.insert(i);
        }
    }
    let mut neg_atoms: Vec<AtomId> = rules.iter().flat_map(|r| r.neg.iter().copied()).collect();
    neg_atoms.sort_unstable();
    neg_atoms.dedup();
    let falsum = store.lookup.get(&Atom::falsum()).copied();
    log::debug!("grounding: {} atoms, {} in closure, {} rule instances", n, store.closure_len, rules.len());
    Ok(GroundProgram { atoms: store.atoms, lookup: store.lookup, rules, base, closure, neg_atoms, falsum })
}

#[allow(clippy::too_many_arguments)]
fn join(
    store: &Store,
    rule: &SkolemRule,
    order: &[usize],
    windows: &[Window],
    k: usize,
    round: u32,
    theta: &mut Substitution,
    emit: &mut dyn FnMut(&Substitution),
) {
    if k == order.len() {
        emit(theta);
        return;
    }
    let j = order[k];
    let pattern = &rule.body_pos[j];
    for &id in store.candidates(pattern, theta) {
        if !windows[j].admits(store.round[id as usize], round) {
            continue;
        }
        if let Some(ext) = match_atom(pattern, &store.atoms[id as usize], theta) {
            let mut ext = ext;
            join(store, rule, order, windows, k + 1, round, &mut ext, emit);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::skolemize;
    use crate::syntax::{parse_database, parse_program};

    const EX1: &str = include_str!("../../../../data/ex1.rules");

    #[test]
    fn example_closure_and_instances() {
        let doc = parse_program(EX1).unwrap();
        let db = parse_database("Bat(a). Mammal(a).").unwrap();
        let g = ground_relevant(&skolemize(&doc.rules), &db, &EngineConfig::default()).unwrap();
        let names: Vec<String> = g.closure().iter().map(Atom::to_string).collect();
        let mut expected = vec![
            "Bat(a)",
            "Mammal(a)",
            "CanFly(a)",
            "LiveIn(a, f_r2_y(a))",
            "Cave(f_r2_y(a))",
            "Trogloxene(a)",
            "CanNotFly(a)",
            "Bird(a)",
            "bottom",
        ];
        expected.sort();
        let mut names_sorted = names.clone();
        names_sorted.sort();
        assert_eq!(names_sorted, expected);
        assert_eq!(g.rules().len(), 8);
        assert!(g.falsum().is_some());
        assert_eq!(g.neg_atoms().len(), 1);
        assert_eq!(g.atom(g.neg_atoms()[0]).to_string(), "CanFly(a)");
    }

    #[test]
    fn empty_database_gives_empty_grounding() {
        let doc = parse_program(EX1).unwrap();
        let g = ground_relevant(&skolemize(&doc.rules), &Database::default(), &EngineConfig::default()).unwrap();
        assert!(g.rules().is_empty());
        assert!(g.closure().is_empty());
    }

    #[test]
    fn existential_cycle_hits_depth_limit() {
        let doc = parse_program("P(x) -> exists y . R(x, y).\nR(x, y) -> P(y).").unwrap();
        let db = parse_database("P(a).").unwrap();
        let err = ground_relevant(&skolemize(&doc.rules), &db, &EngineConfig::default()).unwrap_err();
        assert!(matches!(err, EngineError::DepthLimitExceeded { depth: 8, .. }), "{err}");
    }

    #[test]
    fn atom_cap() {
        let doc = parse_program("P(x), P(y) -> R(x, y).").unwrap();
        let db = parse_database("P(a). P(b). P(c). P(d).").unwrap();
        let cfg = EngineConfig { max_ground_atoms: 10, ..EngineConfig::default() };
        assert_eq!(ground_relevant(&skolemize(&doc.rules), &db, &cfg).unwrap_err(), EngineError::AtomCapExceeded(10));
    }

    #[test]
    fn self_join_instances_are_not_duplicated() {
        let doc = parse_program("R(x, y), R(y, x) -> S(x).").unwrap();
        let db = parse_database("R(a, b). R(b, a). R(c, c).").unwrap();
        let g = ground_relevant(&skolemize(&doc.rules), &db, &EngineConfig::default()).unwrap();
        assert_eq!(g.rules().len(), 3);
    }
}
