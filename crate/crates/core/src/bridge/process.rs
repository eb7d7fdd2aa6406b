use std::io::Read;
use std::process::{Command, Stdio};
use std::thread;

use wait_timeout::ChildExt;

use super::asp::{AspProgram, Mangling};
use super::{BridgeError, SolverConfig};
use crate::model::{Atom, Instance, Term};

/// Runs the solver on `program` and reads its answer sets back.
///
/// The program goes to a temporary file, passed as the last argument after
/// `-n <limit>`. Answer sets are read from lines following `Answer: N`.
pub fn solve_external(program: &AspProgram, cfg: &SolverConfig) -> Result<Vec<Instance>, BridgeError> {
    let mut file = tempfile::Builder::new().suffix(".lp").tempfile().map_err(|e| BridgeError::Io(e.to_string()))?;
    std::io::Write::write_all(&mut file, program.text.as_bytes()).map_err(|e| BridgeError::Io(e.to_string()))?;
    let mut child = Command::new(&cfg.executable)
        .args(&cfg.args)
        .arg("-n")
        .arg(cfg.model_limit.to_string())
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|e| BridgeError::Spawn(format!("{}: {e}", cfg.executable.display())))?;
    let mut out = child.stdout.take().expect("stdout is piped");
    let mut err = child.stderr.take().expect("stderr is piped");
    let out_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = out.read_to_string(&mut s);
        s
    });
    let err_reader = thread::spawn(move || {
        let mut s = String::new();
        let _ = err.read_to_string(&mut s);
        s
    });
    let status = child.wait_timeout(cfg.timeout).map_err(|e| BridgeError::Io(e.to_string()))?;
    if status.is_none() {
        let _ = child.kill();
        let _ = child.wait();
        return Err(BridgeError::Timeout { millis: cfg.timeout.as_millis() as u64 });
    }
    let stdout = out_reader.join().unwrap_or_default();
    let stderr = err_reader.join().unwrap_or_default();
    parse_output(&stdout, &program.mangling).map_err(|e| match e {
        BridgeError::Parse(msg) if !stderr.trim().is_empty() => BridgeError::Parse(format!("{msg}; stderr: {}", stderr.trim())),
        other => other,
    })
}

/// Reads a clingo-style answer-set listing.
pub fn parse_output(stdout: &str, mangling: &Mangling) -> Result<Vec<Instance>, BridgeError> {
    let mut models = Vec::new();
    let mut verdict = false;
    let mut lines = stdout.lines();
    while let Some(line) = lines.next() {
        let line = line.trim();
        if line.starts_with("Answer:") {
            let atoms = lines.next().ok_or_else(|| BridgeError::Parse("answer without atoms".into()))?;
            let mut inst = Vec::new();
            for tok in split_atoms(atoms) {
                inst.push(parse_atom(tok, mangling)?);
            }
            models.push(Instance::new(inst).map_err(|e| BridgeError::Parse(e.to_string()))?);
        } else if matches!(line, "SATISFIABLE" | "UNSATISFIABLE" | "OPTIMUM FOUND") {
            verdict = true;
        } else if line == "UNKNOWN" || line.starts_with("INTERRUPTED") {
            return Err(BridgeError::Parse("solver gave no verdict".into()));
        }
    }
    if !verdict {
        return Err(BridgeError::Parse("no SATISFIABLE/UNSATISFIABLE line in solver output".into()));
    }
    Ok(models)
}

/// Splits on spaces outside parentheses and strings.
fn split_atoms(line: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut in_str, mut esc, mut start) = (0i32, false, false, None);
    for (i, c) in line.char_indices() {
        if in_str {
            match (esc, c) {
                (true, _) => esc = false,
                (false, '\\') => esc = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            continue;
        }
        match c {
            ' ' | '\t' if depth == 0 => {
                if let Some(s) = start.take() {
                    out.push(&line[s..i]);
                }
                continue;
            }
            '(' => depth += 1,
            ')' => depth -= 1,
            '"' => in_str = true,
            _ => {}
        }
        if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(&line[s..]);
    }
    out
}

struct TermParser<'a> {
    s: &'a [u8],
    src: &'a str,
    i: usize,
}

impl<'a> TermParser<'a> {
    fn err(&self, what: &str) -> BridgeError {
        BridgeError::Parse(format!("{what} in `{}`", self.src))
    }

    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i] == b' ' {
            self.i += 1;
        }
    }

    fn ident(&mut self) -> Result<String, BridgeError> {
        self.ws();
        let st = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphanumeric() || matches!(self.s[self.i], b'_' | b'\'' | b'-')) {
            self.i += 1;
        }
        if st == self.i {
            return Err(self.err("expected a name"));
        }
        Ok(self.src[st..self.i].to_string())
    }

    fn string(&mut self) -> Result<String, BridgeError> {
        self.i += 1;
        let mut out = String::new();
        let mut chars = self.src[self.i..].char_indices();
        while let Some((k, c)) = chars.next() {
            match c {
                '"' => {
                    self.i += k + 1;
                    return Ok(out);
                }
                '\\' => match chars.next() {
                    Some((_, 'n')) => out.push('\n'),
                    Some((_, c)) => out.push(c),
                    None => break,
                },
                c => out.push(c),
            }
        }
        Err(self.err("unterminated string"))
    }

    fn args(&mut self, m: &Mangling) -> Result<Vec<Term>, BridgeError> {
        let mut args = Vec::new();
        self.ws();
        if self.s.get(self.i) != Some(&b'(') {
            return Ok(args);
        }
        self.i += 1;
        loop {
            args.push(self.term(m)?);
            self.ws();
            match self.s.get(self.i) {
                Some(b',') => self.i += 1,
                Some(b')') => {
                    self.i += 1;
                    return Ok(args);
                }
                _ => return Err(self.err("expected `,` or `)`")),
            }
        }
    }

    fn term(&mut self, m: &Mangling) -> Result<Term, BridgeError> {
        self.ws();
        if self.s.get(self.i) == Some(&b'"') {
            return Ok(Term::constant(self.string()?));
        }
        let name = self.ident()?;
        let args = self.args(m)?;
        if args.is_empty() {
            if name.parse::<i64>().is_ok() {
                return Ok(Term::constant(name));
            }
            return m
                .demangle_constant(&name)
                .map(|c| Term::Const(c.clone()))
                .ok_or_else(|| self.err(&format!("unknown constant `{name}`")));
        }
        let f = m.demangle_function(&name, args.len()).ok_or_else(|| self.err(&format!("unknown function `{name}`")))?;
        Ok(Term::skolem(f.clone(), args))
    }
}

fn parse_atom(tok: &str, m: &Mangling) -> Result<Atom, BridgeError> {
    let mut p = TermParser { s: tok.as_bytes(), src: tok, i: 0 };
    let name = p.ident()?;
    let args = p.args(m)?;
    p.ws();
    if p.i != p.s.len() {
        return Err(p.err("trailing input"));
    }
    let pred = m
        .demangle_predicate(&name, args.len())
        .ok_or_else(|| p.err(&format!("unknown predicate `{name}/{}`", args.len())))?;
    Ok(Atom { pred: pred.clone(), args })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bridge::emit_asp;
    use crate::engine::skolemize;
    use crate::syntax::{parse_database, parse_program};

    #[test]
    fn reads_answer_sets_through_the_table() {
        let doc = parse_program("r2: Bat(x) -> exists y . LiveIn(x, y), Cave(y).").unwrap();
        let db = parse_database("Bat(a). Q(\"b c\").").unwrap();
        let prog = emit_asp(&db, &skolemize(&doc.rules)).unwrap();
        let out = "clingo version 5.6.2\nSolving...\nAnswer: 1\nbat(a) q(\"b c\") liveIn(a,f_r2_y(a)) cave(f_r2_y(a))\nSATISFIABLE\n";
        let models = parse_output(out, &prog.mangling).unwrap();
        assert_eq!(models.len(), 1);
        let got: Vec<String> = models[0].iter().map(Atom::to_string).collect();
        assert!(got.contains(&"LiveIn(a, f_r2_y(a))".to_string()));
        assert!(got.contains(&"Q(\"b c\")".to_string()));
    }

    #[test]
    fn unsat_is_no_models() {
        assert!(parse_output("UNSATISFIABLE\n", &Mangling::default()).unwrap().is_empty());
    }

    #[test]
    fn garbage_is_an_error() {
        assert!(matches!(parse_output("hello\n", &Mangling::default()), Err(BridgeError::Parse(_))));
    }
}
