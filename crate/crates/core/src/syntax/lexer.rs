use super::error::{ParseError, ParseErrorKind, Pos};

#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) enum Tok {
    Ident(String),
    Str(String),
    Int(i64),
    LParen,
    RParen,
    Comma,
    Dot,
    Colon,
    Arrow,
    Question,
    Eq,
    At,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Int(i) => format!("integer {i}"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Question => "`?`".into(),
            Tok::Eq => "`=`".into(),
            Tok::At => "`@`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Pos)>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                col = 1;
            } else if c.is_some() {
                col += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let pos = Pos { line, col };
        match c {
            c if c.is_whitespace() => {
                bump!();
            }
            '%' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '(' | ')' | ',' | '.' | ':' | '?' | '=' | '@' => {
                bump!();
                let t = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ',' => Tok::Comma,
                    '.' => Tok::Dot,
                    ':' => Tok::Colon,
                    '?' => Tok::Question,
                    '=' => Tok::Eq,
                    _ => Tok::At,
                };
                out.push((t, pos));
            }
            '-' => {
                bump!();
                match chars.peek() {
                    Some('>') => {
                        bump!();
                        out.push((Tok::Arrow, pos));
                    }
                    Some(d) if d.is_ascii_digit() => {
                        let n = lex_int(&mut chars, &mut col, pos)?;
                        out.push((Tok::Int(-n), pos));
                    }
                    _ => return Err(ParseError::new(pos, ParseErrorKind::Syntax("stray `-`".into()))),
                }
            }
            '"' => {
                bump!();
                let mut s = String::new();
                loop {
                    match bump!() {
                        None | Some('\n') => {
                            return Err(ParseError::new(pos, ParseErrorKind::Syntax("unterminated string".into())))
                        }
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('n') => s.push('\n'),
                            Some(e @ ('"' | '\\')) => s.push(e),
                            _ => {
                                return Err(ParseError::new(pos, ParseErrorKind::Syntax("bad escape in string".into())))
                            }
                        },
                        Some(ch) => s.push(ch),
                    }
                }
                out.push((Tok::Str(s), pos));
            }
            d if d.is_ascii_digit() => {
                let n = lex_int(&mut chars, &mut col, pos)?;
                out.push((Tok::Int(n), pos));
            }
            a if a.is_ascii_alphabetic() || a == '_' => {
                let mut s = String::new();
                while let Some(&ch) = chars.peek() {
                    if ch.is_ascii_alphanumeric() || ch == '_' || ch == '\'' {
                        s.push(ch);
                        bump!();
                    } else {
                        break;
                    }
                }
                out.push((Tok::Ident(s), pos));
            }
            other => {
                return Err(ParseError::new(pos, ParseErrorKind::Syntax(format!("unexpected character {other:?}"))));
            }
        }
    }
    out.push((Tok::Eof, Pos { line, col }));
    Ok(out)
}

fn lex_int(chars: &mut std::iter::Peekable<std::str::Chars<'_>>, col: &mut usize, pos: Pos) -> Result<i64, ParseError> {
    let mut s = String::new();
    while let Some(&d) = chars.peek() {
        if d.is_ascii_digit() {
            s.push(d);
            chars.next();
            *col += 1;
        } else {
            break;
        }
    }
    s.parse().map_err(|_| ParseError::new(pos, ParseErrorKind::Syntax("integer out of range".into())))
}
