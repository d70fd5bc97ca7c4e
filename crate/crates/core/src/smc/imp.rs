//! `.imp` program text.
//!
//! ```text
//! stmt  ::= simple (';' simple)*
//! simple::= 'skip' | x ':=' aexp | 'if' bexp 'then' simple 'else' simple
//!         | 'while' bexp 'do' simple | '(' stmt ')'
//! bexp  ::= aexp '<=' aexp
//! aexp  ::= atom ('+' atom)*          left-associative
//! atom  ::= natural | x | '(' aexp ')'
//! ```
//!
//! Sequences nest to the right. `#` starts a comment that runs to the end of
//! the line.

use super::{is_reserved, smc_signature_with, AExp, BExp, DecodeError, EncodeError, Encoder, Stmt};
use crate::formula::Formula;
use crate::signature::{Signature, SignatureError, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ImpError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Num(u64),
    Sym(&'static str),
    Eof,
}

struct Lexer {
    toks: Vec<(Tok, usize, usize)>,
    at: usize,
}

fn lex(text: &str) -> Result<Lexer, ImpError> {
    let mut toks = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let (line, col) = (ln + 1, i + 1);
            if c.is_whitespace() {
                i += 1;
            } else if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = chars[start..i].iter().collect();
                let n = digits.parse().map_err(|_| ImpError::Syntax { line, col, msg: format!("numeral {digits} is too large") })?;
                toks.push((Tok::Num(n), line, col));
            } else if c.is_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                toks.push((Tok::Ident(chars[start..i].iter().collect()), line, col));
            } else {
                let rest: String = chars[i..].iter().take(2).collect();
                let sym = [":=", "<=", ";", "+", "(", ")"].into_iter().find(|s| rest.starts_with(s));
                let Some(sym) = sym else {
                    return Err(ImpError::Syntax { line, col, msg: format!("unexpected character '{c}'") });
                };
                toks.push((Tok::Sym(sym), line, col));
                i += sym.len();
            }
        }
    }
    let (line, col) = (text.lines().count().max(1), text.lines().last().map_or(1, |l| l.chars().count() + 1));
    toks.push((Tok::Eof, line, col));
    Ok(Lexer { toks, at: 0 })
}

const KEYWORDS: &[&str] = &["if", "then", "else", "while", "do", "skip"];

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].0.clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn error<T>(&self, msg: impl Into<String>) -> Result<T, ImpError> {
        let (_, line, col) = &self.toks[self.at];
        Err(ImpError::Syntax { line: *line, col: *col, msg: msg.into() })
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn is_sym(&self, sym: &str) -> bool {
        matches!(self.peek(), Tok::Sym(s) if *s == sym)
    }

    fn expect_kw(&mut self, kw: &str) -> Result<(), ImpError> {
        if self.is_kw(kw) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{kw}'"))
        }
    }

    fn expect_sym(&mut self, sym: &str) -> Result<(), ImpError> {
        if self.is_sym(sym) {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected '{sym}'"))
        }
    }

    fn variable(&mut self) -> Result<String, ImpError> {
        match self.peek().clone() {
            Tok::Ident(x) if KEYWORDS.contains(&x.as_str()) => self.error(format!("keyword '{x}' used as a variable")),
            Tok::Ident(x) if is_reserved(&x) => self.error(format!("'{x}' is reserved")),
            Tok::Ident(x) => {
                self.bump();
                Ok(x)
            }
            _ => self.error("expected a variable"),
        }
    }

    fn stmt(&mut self) -> Result<Stmt, ImpError> {
        let mut parts = vec![self.simple()?];
        while self.is_sym(";") {
            self.bump();
            parts.push(self.simple()?);
        }
        let last = parts.pop().expect("non-empty");
        Ok(parts.into_iter().rev().fold(last, |acc, s| Stmt::seq(s, acc)))
    }

    fn simple(&mut self) -> Result<Stmt, ImpError> {
        if self.is_sym("(") {
            self.bump();
            let s = self.stmt()?;
            self.expect_sym(")")?;
            return Ok(s);
        }
        if self.is_kw("skip") {
            self.bump();
            return Ok(Stmt::Skip);
        }
        if self.is_kw("if") {
            self.bump();
            let b = self.bexp()?;
            self.expect_kw("then")?;
            let s1 = self.simple()?;
            self.expect_kw("else")?;
            let s2 = self.simple()?;
            return Ok(Stmt::If(b, Box::new(s1), Box::new(s2)));
        }
        if self.is_kw("while") {
            self.bump();
            let b = self.bexp()?;
            self.expect_kw("do")?;
            let body = self.simple()?;
            return Ok(Stmt::While(b, Box::new(body)));
        }
        let x = self.variable()?;
        self.expect_sym(":=")?;
        Ok(Stmt::Assign(x, self.aexp()?))
    }

    fn bexp(&mut self) -> Result<BExp, ImpError> {
        let a = self.aexp()?;
        self.expect_sym("<=")?;
        Ok(BExp(a, self.aexp()?))
    }

    fn aexp(&mut self) -> Result<AExp, ImpError> {
        let mut a = self.atom()?;
        while self.is_sym("+") {
            self.bump();
            a = AExp::Plus(Box::new(a), Box::new(self.atom()?));
        }
        Ok(a)
    }

    fn atom(&mut self) -> Result<AExp, ImpError> {
        match self.peek().clone() {
            Tok::Num(n) => {
                self.bump();
                Ok(AExp::Num(n))
            }
            Tok::Sym("(") => {
                self.bump();
                let a = self.aexp()?;
                self.expect_sym(")")?;
                Ok(a)
            }
            _ => self.variable().map(AExp::Var),
        }
    }
}

pub fn parse_program(text: &str) -> Result<Stmt, ImpError> {
    let mut lx = lex(text)?;
    let s = lx.stmt()?;
    if *lx.peek() != Tok::Eof {
        return lx.error("expected ';' or end of program");
    }
    Ok(s)
}

/// Text that [`parse_program`] reads back to the same statement.
pub fn print_stmt(s: &Stmt) -> String {
    fn nested(s: &Stmt) -> String {
        match s {
            Stmt::Seq(..) => format!("({})", print_stmt(s)),
            _ => print_stmt(s),
        }
    }
    match s {
        Stmt::Assign(x, a) => format!("{x} := {a}"),
        Stmt::If(b, s1, s2) => format!("if {b} then {} else {}", nested(s1), nested(s2)),
        Stmt::While(b, body) => format!("while {b} do {}", nested(body)),
        Stmt::Skip => "skip".into(),
        Stmt::Seq(a, b) => format!("{}; {}", nested(a), print_stmt(b)),
    }
}

/// The SMC signature extended with the variables of `s`.
pub fn program_signature(s: &Stmt) -> Result<(Signature, SymbolTable), SignatureError> {
    let vars = s.vars();
    smc_signature_with(&vars.iter().map(String::as_str).collect::<Vec<_>>())
}

/// Parses a program into its `Stmt`-sorted formula over
/// [`program_signature`].
pub fn encode_program(text: &str) -> Result<Formula, ImpError> {
    let s = parse_program(text)?;
    let (sig, _) = program_signature(&s)?;
    Ok(Encoder::new(&sig).stmt(&s)?)
}

/// Program text for a `Stmt`-sorted ground formula.
pub fn print_program(f: &Formula) -> Result<String, DecodeError> {
    super::decode_stmt(f).map(|s| print_stmt(&s))
}
