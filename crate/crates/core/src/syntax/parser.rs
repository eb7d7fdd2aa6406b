use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::error::{ParseError, ParseErrorKind, Pos};
use super::lexer::{tokenize, Tok};
use super::ProgramDocument;
use crate::model::{
    is_variable_name, validate_partition, Atom, Database, Label, ModelError, Name, Query, Rule, RuleSet, Term, KEYWORDS,
};

struct Parser {
    toks: Vec<(Tok, Pos)>,
    at: usize,
    arities: HashMap<String, usize>,
}

type PResult<T> = Result<T, ParseError>;

enum Literal {
    Pos(Atom),
    Neg(Atom),
}

impl Parser {
    fn new(text: &str) -> PResult<Parser> {
        Ok(Parser { toks: tokenize(text)?, at: 0, arities: HashMap::new() })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.at + k).min(self.toks.len() - 1)].0
    }

    fn pos(&self) -> Pos {
        self.toks[self.at].1
    }

    fn next(&mut self) -> (Tok, Pos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn err<T>(&self, msg: impl Into<String>) -> PResult<T> {
        Err(ParseError::new(self.pos(), ParseErrorKind::Syntax(msg.into())))
    }

    fn expect(&mut self, want: Tok) -> PResult<Pos> {
        if *self.peek() == want {
            Ok(self.next().1)
        } else {
            self.err(format!("expected {}, found {}", want.describe(), self.peek().describe()))
        }
    }

    fn eat(&mut self, want: &Tok) -> bool {
        if self.peek() == want {
            self.next();
            true
        } else {
            false
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Pos)> {
        match self.peek().clone() {
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                let p = self.next().1;
                Ok((s, p))
            }
            other => self.err(format!("expected {what}, found {}", other.describe())),
        }
    }

    fn atom(&mut self) -> PResult<Atom> {
        if self.is_kw("bottom") {
            self.next();
            return Ok(Atom::falsum());
        }
        let (name, pos) = self.ident("predicate name")?;
        let mut args = Vec::new();
        if self.eat(&Tok::LParen) && !self.eat(&Tok::RParen) {
            loop {
                args.push(self.term()?);
                if self.eat(&Tok::RParen) {
                    break;
                }
                self.expect(Tok::Comma)?;
            }
        }
        match self.arities.get(&name) {
            Some(&a) if a != args.len() => {
                return Err(ParseError::new(
                    pos,
                    ParseErrorKind::ArityMismatch { name, expected: a, found: args.len() },
                ))
            }
            Some(_) => {}
            None => {
                self.arities.insert(name.clone(), args.len());
            }
        }
        Ok(Atom::new(name, args))
    }

    fn term(&mut self) -> PResult<Term> {
        let pos = self.pos();
        match self.next().0 {
            Tok::Str(s) => Ok(Term::constant(s)),
            Tok::Int(i) => Ok(Term::constant(i.to_string())),
            Tok::Ident(s) if !KEYWORDS.contains(&s.as_str()) => {
                if *self.peek() == Tok::LParen {
                    return Err(ParseError::new(pos, ParseErrorKind::FunctionTerm));
                }
                Ok(if is_variable_name(&s) { Term::var(s) } else { Term::constant(s) })
            }
            other => Err(ParseError::new(
                pos,
                ParseErrorKind::Syntax(format!("expected a term, found {}", other.describe())),
            )),
        }
    }

    fn literal(&mut self) -> PResult<Literal> {
        if self.is_kw("not") {
            self.next();
            Ok(Literal::Neg(self.atom()?))
        } else {
            Ok(Literal::Pos(self.atom()?))
        }
    }

    fn literals_until(&mut self, stop: &[Tok]) -> PResult<(Vec<Atom>, Vec<Atom>)> {
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        if stop.contains(self.peek()) {
            return Ok((pos, neg));
        }
        loop {
            match self.literal()? {
                Literal::Pos(a) => pos.push(a),
                Literal::Neg(a) => neg.push(a),
            }
            if !self.eat(&Tok::Comma) {
                return Ok((pos, neg));
            }
        }
    }

    fn head_atoms(&mut self) -> PResult<Vec<Atom>> {
        let mut out = Vec::new();
        loop {
            if self.is_kw("not") {
                return Err(ParseError::new(self.pos(), ParseErrorKind::NegatedHead));
            }
            out.push(self.atom()?);
            if !self.eat(&Tok::Comma) {
                return Ok(out);
            }
        }
    }

    fn rule(&mut self, default_label: Label) -> PResult<Rule> {
        let start = self.pos();
        let label = match (self.peek().clone(), self.peek_at(1).clone()) {
            (Tok::Ident(s), Tok::Colon) if !KEYWORDS.contains(&s.as_str()) => {
                self.next();
                self.next();
                Label::new(s)
            }
            _ => default_label,
        };
        let (body_pos, body_neg) = self.literals_until(&[Tok::Arrow])?;
        self.expect(Tok::Arrow)?;
        let mut exist: Vec<Name> = Vec::new();
        if self.is_kw("exists") {
            self.next();
            loop {
                let (v, p) = self.ident("existential variable")?;
                if !is_variable_name(&v) {
                    return Err(ParseError::new(p, ParseErrorKind::Syntax(format!("`{v}` is not a variable name"))));
                }
                exist.push(Arc::from(v));
                if !self.eat(&Tok::Comma) {
                    break;
                }
            }
            self.expect(Tok::Dot)?;
        }
        let head = self.head_atoms()?;
        self.expect(Tok::Dot)?;
        Rule::new(label, body_pos, body_neg, head, exist).map_err(|e| ParseError::new(start, e.into()))
    }
}

/// Parses a rule file: labelled rules plus `@priority` / `@weight` directives.
pub fn parse_program(text: &str) -> Result<ProgramDocument, ParseError> {
    let mut p = Parser::new(text)?;
    let mut rules = Vec::new();
    let mut spans = Vec::new();
    let mut levels: BTreeMap<i64, (Vec<(Label, Pos)>, Pos)> = BTreeMap::new();
    let mut weights: Vec<(Label, i64, Pos)> = Vec::new();

    while *p.peek() != Tok::Eof {
        if *p.peek() == Tok::At {
            let at = p.next().1;
            let (kind, kpos) = match p.next() {
                (Tok::Ident(s), pos) => (s, pos),
                (_, pos) => return Err(ParseError::new(pos, ParseErrorKind::Syntax("expected directive name".into()))),
            };
            match kind.as_str() {
                "priority" => {
                    let level = match p.next() {
                        (Tok::Int(i), _) => i,
                        (t, pos) => {
                            return Err(ParseError::new(
                                pos,
                                ParseErrorKind::Syntax(format!("expected priority level, found {}", t.describe())),
                            ))
                        }
                    };
                    p.expect(Tok::Eq)?;
                    let entry = levels.entry(level).or_insert_with(|| (Vec::new(), at));
                    loop {
                        let (l, lp) = p.ident("rule label")?;
                        entry.0.push((Label::new(l), lp));
                        if !p.eat(&Tok::Comma) {
                            break;
                        }
                    }
                    p.expect(Tok::Dot)?;
                }
                "weight" => {
                    let (l, lp) = p.ident("rule label")?;
                    p.expect(Tok::Eq)?;
                    let w = match p.next() {
                        (Tok::Int(i), _) => i,
                        (t, pos) => {
                            return Err(ParseError::new(
                                pos,
                                ParseErrorKind::Syntax(format!("expected weight, found {}", t.describe())),
                            ))
                        }
                    };
                    p.expect(Tok::Dot)?;
                    weights.push((Label::new(l), w, lp));
                }
                other => {
                    return Err(ParseError::new(kpos, ParseErrorKind::Syntax(format!("unknown directive `@{other}`"))))
                }
            }
            continue;
        }
        let start = p.pos();
        let r = p.rule(Label::new(format!("r{}", rules.len() + 1)))?;
        if rules.iter().any(|q: &Rule| q.label() == r.label()) {
            return Err(ParseError::new(start, ModelError::DuplicateLabel(r.label().clone()).into()));
        }
        rules.push(r);
        spans.push(start);
    }

    let rules = RuleSet::new(rules).expect("labels checked while parsing");

    let prioritization = if levels.is_empty() {
        None
    } else {
        let first_pos = levels.values().map(|(_, p)| *p).min().unwrap_or_default();
        let mut out = Vec::new();
        for (labels, _) in levels.into_values() {
            for (l, lp) in &labels {
                if rules.get(l).is_none() {
                    return Err(ParseError::new(*lp, ModelError::UnknownLabel(l.clone()).into()));
                }
            }
            out.push(labels.into_iter().map(|(l, _)| l).collect::<Vec<_>>());
        }
        validate_partition(&out, &rules).map_err(|e| ParseError::new(first_pos, e.into()))?;
        Some(out)
    };

    let weights = if weights.is_empty() {
        None
    } else {
        let mut map = BTreeMap::new();
        for (l, w, lp) in weights {
            if rules.get(&l).is_none() {
                return Err(ParseError::new(lp, ModelError::UnknownLabel(l).into()));
            }
            if w < 1 {
                return Err(ParseError::new(lp, ModelError::InvalidWeight { label: l, weight: w }.into()));
            }
            if map.insert(l.clone(), w).is_some() {
                return Err(ParseError::new(lp, ParseErrorKind::DuplicateWeight(l.to_string())));
            }
        }
        Some(map)
    };

    Ok(ProgramDocument { rules, prioritization, weights, spans })
}

/// Parses `.`-terminated ground facts.
pub fn parse_database(text: &str) -> Result<Database, ParseError> {
    let mut p = Parser::new(text)?;
    let mut facts = Vec::new();
    while *p.peek() != Tok::Eof {
        let start = p.pos();
        let a = p.atom()?;
        p.expect(Tok::Dot)?;
        // validate one fact at a time so the error points at it
        Database::new([a.clone()]).map_err(|e| ParseError::new(start, e.into()))?;
        facts.push(a);
    }
    Ok(Database::new(facts).expect("facts validated individually"))
}

/// Parses `? lit, lit, ...` with an optional trailing `.`.
pub fn parse_query(text: &str) -> Result<Query, ParseError> {
    let mut p = Parser::new(text)?;
    let start = p.expect(Tok::Question)?;
    let (pos, neg) = p.literals_until(&[Tok::Dot, Tok::Eof])?;
    p.eat(&Tok::Dot);
    if *p.peek() != Tok::Eof {
        return p.err(format!("unexpected {} after query", p.peek().describe()));
    }
    Query::new(pos, neg).map_err(|e| ParseError::new(start, e.into()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::PreferenceKind;

    #[test]
    fn negation_in_body() {
        let doc = parse_program("r4: Mammal(x), not CanFly(x) -> CanNotFly(x).").unwrap();
        let r = &doc.rules.rules()[0];
        assert_eq!(r.label().as_str(), "r4");
        assert_eq!(r.body_pos(), &[Atom::new("Mammal", vec![Term::var("x")])]);
        assert_eq!(r.body_neg(), &[Atom::new("CanFly", vec![Term::var("x")])]);
        assert_eq!(r.head(), &[Atom::new("CanNotFly", vec![Term::var("x")])]);
    }

    #[test]
    fn existential_head() {
        let doc = parse_program("r2: Bat(x) -> exists y . LiveIn(x,y), Cave(y).").unwrap();
        let r = &doc.rules.rules()[0];
        assert_eq!(r.exist_vars(), &[Arc::<str>::from("y")]);
        assert_eq!(r.head().len(), 2);
    }

    #[test]
    fn unsafe_rule_is_rejected() {
        let e = parse_program("bad: not P(x) -> Q(x).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::UnsafeVariable { .. })));
        assert_eq!(e.pos, Pos { line: 1, col: 1 });
    }

    #[test]
    fn constraint_and_default_labels() {
        let doc = parse_program("P(x) -> Q(x).\nQ(x), R(x) -> bottom.").unwrap();
        let labels: Vec<_> = doc.rules.labels().iter().map(|l| l.to_string()).collect();
        assert_eq!(labels, ["r1", "r2"]);
        assert!(doc.rules.rules()[1].is_constraint());
    }

    #[test]
    fn rule_errors() {
        let e = parse_program("P(x) -> not Q(x).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::NegatedHead);
        let e = parse_program("a: P(x) -> Q(x).\na: Q(x) -> R(x).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Model(ModelError::DuplicateLabel(Label::new("a"))));
        assert_eq!(e.pos.line, 2);
        let e = parse_program("a: P(x) -> Q(x).\n@weight a = 0.").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::InvalidWeight { weight: 0, .. })));
        let e = parse_program("a: P(x) -> Q(x).\nb: Q(x) -> R(x).\n@priority 1 = a.").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::NotAPartition(_))));
        let e = parse_program("a: P(x) -> Q(x)").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Syntax(_)));
        assert_eq!(e.pos, Pos { line: 1, col: 16 });
        let e = parse_program("a: P(x) -> Q(x, x).\nb: Q(x) -> R(x).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::ArityMismatch { .. }));
    }

    #[test]
    fn directives() {
        let doc = parse_program(
            "r1: A(x) -> B(x). r2: B(x) -> C(x). r3: C(x) -> bottom.\n\
             @priority 2 = r3.\n@priority 1 = r1, r2.\n@weight r1 = 3. @weight r2 = 2. @weight r3 = 1.",
        )
        .unwrap();
        let levels = doc.prioritization.clone().unwrap();
        assert_eq!(levels, vec![vec![Label::new("r1"), Label::new("r2")], vec![Label::new("r3")]]);
        assert_eq!(doc.weights.as_ref().unwrap()[&Label::new("r1")], 3);
        let spec = doc.preference(PreferenceKind::PrioSubset).unwrap();
        assert_eq!(spec.prioritization.len(), 2);
    }

    #[test]
    fn database_examples() {
        let db = parse_database("Bat(a). Mammal(a). Bat(a).").unwrap();
        assert_eq!(db.len(), 2);
        assert!(parse_database("").unwrap().is_empty());
        let e = parse_database("Bat(x).").unwrap_err();
        assert!(matches!(e.kind, ParseErrorKind::Model(ModelError::NonGroundFact(_))));
        let e = parse_database("bottom.").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::Model(ModelError::FalsumInDatabase));
        let e = parse_database("P(f(a)).").unwrap_err();
        assert_eq!(e.kind, ParseErrorKind::FunctionTerm);
    }

    #[test]
    fn query_examples() {
        let q = parse_query("? Mammal(a)").unwrap();
        assert_eq!(q.pos(), &[Atom::new("Mammal", vec![Term::constant("a")])]);
        assert!(q.neg().is_empty());
        let q = parse_query("? Bird(x), not Trogloxene(x)").unwrap();
        assert_eq!(q.pos(), &[Atom::new("Bird", vec![Term::var("x")])]);
        assert_eq!(q.neg(), &[Atom::new("Trogloxene", vec![Term::var("x")])]);
        let q = parse_query("? not P(x)").unwrap();
        assert!(q.pos().is_empty());
        assert!(parse_query("?").unwrap().pos().is_empty());
        assert_eq!(parse_query("? P(f_r2_y(a))").unwrap_err().kind, ParseErrorKind::FunctionTerm);
        assert!(parse_query("Mammal(a)").is_err());
    }

    #[test]
    fn comments_and_quoted_constants() {
        let db = parse_database("% a comment\nLives(\"New York\", 42). % trailing\n").unwrap();
        let a = db.iter().next().unwrap();
        assert_eq!(a.args, vec![Term::constant("New York"), Term::constant("42")]);
    }
}
