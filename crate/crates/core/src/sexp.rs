//! A minimal s-expression reader shared by the formula, first-order and
//! proof-file front ends.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Sexp {
    Atom { text: String, pos: usize },
    /// `( ... )`
    List { items: Vec<Sexp>, pos: usize },
    /// `[ ... ]`, used for formula lists inside proof bindings.
    Bracket { items: Vec<Sexp>, pos: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at offset {pos}: {msg}")]
pub struct SyntaxError {
    pub pos: usize,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        Self { pos, msg: msg.into() }
    }
}

impl Sexp {
    pub fn pos(&self) -> usize {
        match self {
            Sexp::Atom { pos, .. } | Sexp::List { pos, .. } | Sexp::Bracket { pos, .. } => *pos,
        }
    }

    pub fn as_atom(&self) -> Option<&str> {
        match self {
            Sexp::Atom { text, .. } => Some(text),
            _ => None,
        }
    }
}

impl fmt::Display for Sexp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn join(f: &mut fmt::Formatter<'_>, items: &[Sexp]) -> fmt::Result {
            for (i, it) in items.iter().enumerate() {
                if i > 0 {
                    f.write_str(" ")?;
                }
                write!(f, "{it}")?;
            }
            Ok(())
        }
        match self {
            Sexp::Atom { text, .. } => f.write_str(text),
            Sexp::List { items, .. } => {
                f.write_str("(")?;
                join(f, items)?;
                f.write_str(")")
            }
            Sexp::Bracket { items, .. } => {
                f.write_str("[")?;
                join(f, items)?;
                f.write_str("]")
            }
        }
    }
}

fn is_delim(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '[' | ']')
}

struct Reader<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Reader<'a> {
    fn skip_ws(&mut self) {
        while let Some(c) = self.src[self.pos..].chars().next() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Sexp, SyntaxError> {
        self.skip_ws();
        let start = self.pos;
        let Some(c) = self.src[self.pos..].chars().next() else {
            return Err(SyntaxError::new(start, "unexpected end of input"));
        };
        match c {
            '(' | '[' => {
                let close = if c == '(' { ')' } else { ']' };
                self.pos += 1;
                let mut items = Vec::new();
                loop {
                    self.skip_ws();
                    match self.src[self.pos..].chars().next() {
                        None => return Err(SyntaxError::new(start, format!("unclosed '{c}'"))),
                        Some(d) if d == close => {
                            self.pos += 1;
                            break;
                        }
                        Some(d @ (')' | ']')) => {
                            return Err(SyntaxError::new(self.pos, format!("mismatched '{d}'")))
                        }
                        Some(_) => items.push(self.read()?),
                    }
                }
                Ok(if c == '(' {
                    Sexp::List { items, pos: start }
                } else {
                    Sexp::Bracket { items, pos: start }
                })
            }
            ')' | ']' => Err(SyntaxError::new(start, format!("unexpected '{c}'"))),
            _ => {
                let rest = &self.src[self.pos..];
                let len = rest.find(is_delim).unwrap_or(rest.len());
                self.pos += len;
                Ok(Sexp::Atom {
                    text: rest[..len].to_string(),
                    pos: start,
                })
            }
        }
    }
}

/// Reads exactly one s-expression from `src`; trailing non-whitespace is an error.
pub fn parse_one(src: &str) -> Result<Sexp, SyntaxError> {
    let mut r = Reader { src, pos: 0 };
    let e = r.read()?;
    r.skip_ws();
    if r.pos != src.len() {
        return Err(SyntaxError::new(r.pos, "trailing input"));
    }
    Ok(e)
}

/// Reads a whitespace-separated sequence of s-expressions.
pub fn parse_many(src: &str) -> Result<Vec<Sexp>, SyntaxError> {
    let mut r = Reader { src, pos: 0 };
    let mut out = Vec::new();
    loop {
        r.skip_ws();
        if r.pos == src.len() {
            return Ok(out);
        }
        out.push(r.read()?);
    }
}
