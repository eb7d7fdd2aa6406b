use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

/// Shared, cheaply clonable identifier.
pub type Name = Arc<str>;

/// Rule identifier. Ordered "naturally", so `r2 < r10`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(Name);

impl Label {
    pub fn new(s: impl AsRef<str>) -> Self {
        Label(Arc::from(s.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label::new(s)
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl Ord for Label {
    fn cmp(&self, other: &Self) -> Ordering {
        natural_cmp(&self.0, &other.0)
    }
}

impl PartialOrd for Label {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Compares strings chunk-wise, treating runs of ASCII digits as numbers.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let (mut a, mut b) = (a.as_bytes(), b.as_bytes());
    loop {
        match (a.first(), b.first()) {
            (None, None) => return Ordering::Equal,
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let na = a.iter().take_while(|c| c.is_ascii_digit()).count();
                let nb = b.iter().take_while(|c| c.is_ascii_digit()).count();
                let da = trim_zeros(&a[..na]);
                let db = trim_zeros(&b[..nb]);
                let ord = da.len().cmp(&db.len()).then_with(|| da.cmp(db)).then(na.cmp(&nb));
                if ord != Ordering::Equal {
                    return ord;
                }
                a = &a[na..];
                b = &b[nb..];
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(y);
                }
                a = &a[1..];
                b = &b[1..];
            }
        }
    }
}

fn trim_zeros(d: &[u8]) -> &[u8] {
    let n = d.iter().take_while(|&&c| c == b'0').count();
    &d[n.min(d.len().saturating_sub(1))..]
}

/// Skolem function symbol `f_<rule>_<var>`; one per (rule, existential variable).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SkolemFn {
    pub rule: Label,
    pub var: Name,
}

impl fmt::Display for SkolemFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "f_{}_{}", self.rule, self.var)
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SkolemTerm {
    pub func: SkolemFn,
    pub args: Vec<Term>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Const(Name),
    Var(Name),
    Skolem(Arc<SkolemTerm>),
}

impl Term {
    pub fn constant(name: impl AsRef<str>) -> Self {
        Term::Const(Arc::from(name.as_ref()))
    }

    pub fn var(name: impl AsRef<str>) -> Self {
        Term::Var(Arc::from(name.as_ref()))
    }

    pub fn skolem(func: SkolemFn, args: Vec<Term>) -> Self {
        Term::Skolem(Arc::new(SkolemTerm { func, args }))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Const(_) => true,
            Term::Var(_) => false,
            Term::Skolem(s) => s.args.iter().all(Term::is_ground),
        }
    }

    pub fn has_skolem(&self) -> bool {
        matches!(self, Term::Skolem(_))
    }

    /// Nesting depth of skolem applications; constants and variables have depth 0.
    pub fn depth(&self) -> usize {
        match self {
            Term::Skolem(s) => 1 + s.args.iter().map(Term::depth).max().unwrap_or(0),
            _ => 0,
        }
    }

    /// Pushes every variable name occurring in the term.
    pub fn collect_vars(&self, out: &mut Vec<Name>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Skolem(s) => s.args.iter().for_each(|t| t.collect_vars(out)),
        }
    }

    pub fn collect_constants(&self, out: &mut Vec<Name>) {
        match self {
            Term::Const(c) => {
                if !out.contains(c) {
                    out.push(c.clone());
                }
            }
            Term::Var(_) => {}
            Term::Skolem(s) => s.args.iter().for_each(|t| t.collect_constants(out)),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Const(c) => write_constant(f, c),
            Term::Var(v) => f.write_str(v),
            Term::Skolem(s) => {
                write!(f, "{}(", s.func)?;
                for (i, a) in s.args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

pub(crate) const KEYWORDS: [&str; 3] = ["not", "exists", "bottom"];

/// Surface-syntax convention: a variable is one letter in `u..=z` followed
/// only by digits or primes (`x`, `y2`, `z'`).
pub fn is_variable_name(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if ('u'..='z').contains(&c) => chars.all(|c| c.is_ascii_digit() || c == '\''),
        _ => false,
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {
            chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'')
        }
        _ => false,
    }
}

/// Constants print bare when they would re-parse as constants, quoted otherwise.
fn write_constant(f: &mut fmt::Formatter<'_>, c: &str) -> fmt::Result {
    if is_identifier(c) && !is_variable_name(c) && !KEYWORDS.contains(&c) {
        f.write_str(c)
    } else {
        f.write_str("\"")?;
        for ch in c.chars() {
            match ch {
                '"' => f.write_str("\\\"")?,
                '\\' => f.write_str("\\\\")?,
                '\n' => f.write_str("\\n")?,
                _ => write!(f, "{ch}")?,
            }
        }
        f.write_str("\"")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_sort_naturally() {
        let mut v: Vec<Label> = ["r10", "r2", "r1", "a", "r02"].iter().map(Label::new).collect();
        v.sort();
        let s: Vec<&str> = v.iter().map(Label::as_str).collect();
        assert_eq!(s, ["a", "r1", "r2", "r02", "r10"]);
    }

    #[test]
    fn variable_convention() {
        assert!(is_variable_name("x"));
        assert!(is_variable_name("y2"));
        assert!(is_variable_name("z'"));
        assert!(!is_variable_name("a"));
        assert!(!is_variable_name("xy"));
        assert!(!is_variable_name("X"));
    }

    #[test]
    fn constants_that_look_like_variables_are_quoted() {
        assert_eq!(Term::constant("a").to_string(), "a");
        assert_eq!(Term::constant("x").to_string(), "\"x\"");
        assert_eq!(Term::constant("not").to_string(), "\"not\"");
        assert_eq!(Term::constant("New York").to_string(), "\"New York\"");
    }

    #[test]
    fn skolem_depth() {
        let f = SkolemFn { rule: Label::new("r2"), var: Arc::from("y") };
        let t = Term::skolem(f.clone(), vec![Term::skolem(f, vec![Term::constant("a")])]);
        assert_eq!(t.depth(), 2);
        assert_eq!(t.to_string(), "f_r2_y(f_r2_y(a))");
    }
}
