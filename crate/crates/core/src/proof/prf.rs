//! The `.prf` line format.
//!
//! ```text
//! <idx> <sort> "<formula>" <just> [# note]
//! ```
//!
//! Blank lines and lines starting with `#` are skipped.

use std::fmt::Write as _;

use super::scheme::{meta_kind, Binding, Bindings, MetaKind, SchemeId, SchemeInstance};
use super::{Justification, Params, ProofLine};
use crate::sexp::{self, Sexp, SyntaxError};
use crate::signature::{Signature, SymbolTable};
use crate::sortcheck;
use crate::syntax::{print_context, print_formula, Parser};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}: {msg}")]
pub struct PrfError {
    pub line: usize,
    pub msg: String,
}

struct LineParser<'a> {
    p: Parser<'a>,
    line: usize,
}

impl LineParser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PrfError> {
        Err(PrfError { line: self.line, msg: msg.into() })
    }

    fn syn<T>(&self, r: Result<T, SyntaxError>) -> Result<T, PrfError> {
        r.map_err(|e| PrfError { line: self.line, msg: e.to_string() })
    }

    fn formula_text(&self, text: &str) -> Result<crate::formula::Formula, PrfError> {
        let e = self.syn(sexp::parse_one(text))?;
        self.formula(&e)
    }

    fn formula(&self, e: &Sexp) -> Result<crate::formula::Formula, PrfError> {
        let f = self.syn(self.p.formula(e))?;
        if let Err(e) = sortcheck::sort_of(self.p.sig, self.p.tab, &f) {
            return self.err(e.to_string());
        }
        Ok(f)
    }

    fn number(&self, tok: Option<&str>, what: &str) -> Result<usize, PrfError> {
        match tok.map(str::parse::<usize>) {
            Some(Ok(n)) => Ok(n),
            _ => self.err(format!("expected {what}")),
        }
    }

    fn state(&self, tok: Option<&str>) -> Result<crate::signature::StateSymbol, PrfError> {
        let Some(name) = tok else { return self.err("expected a state symbol") };
        match self.p.tab.state_symbol(name) {
            Some(z) => Ok(z),
            None => self.err(format!("'{name}' is not a nominal or state variable")),
        }
    }

    /// Splits `{k=v; ...}` into pairs; an absent block is empty.
    fn block<'t>(&self, rest: &'t str) -> Result<Vec<(&'t str, &'t str)>, PrfError> {
        let rest = rest.trim();
        if rest.is_empty() {
            return Ok(vec![]);
        }
        let Some(inner) = rest.strip_prefix('{').and_then(|r| r.strip_suffix('}')) else {
            return self.err("expected '{...}'");
        };
        let mut out = Vec::new();
        for item in inner.split(';').map(str::trim).filter(|s| !s.is_empty()) {
            let Some((k, v)) = item.split_once('=') else {
                return self.err(format!("expected name=value, found '{item}'"));
            };
            out.push((k.trim(), v.trim()));
        }
        Ok(out)
    }

    fn binding(&self, k: &str, v: &str) -> Result<Binding, PrfError> {
        let Some(kind) = meta_kind(k) else { return self.err(format!("unknown metavariable '{k}'")) };
        let e = self.syn(sexp::parse_one(v))?;
        Ok(match kind {
            MetaKind::Formula => Binding::Formula(self.formula(&e)?),
            MetaKind::State => Binding::State(self.syn(self.p.state_symbol(&e))?),
            MetaKind::Sort => match self.p.sig.sort(v) {
                Some(s) => Binding::Sort(s),
                None => return self.err(format!("unknown sort '{v}'")),
            },
            MetaKind::Op => match self.p.sig.op(v) {
                Some(o) => Binding::Op(o.clone()),
                None => return self.err(format!("unknown operator '{v}'")),
            },
            MetaKind::Pos => Binding::Pos(self.number(Some(v), "a position")?),
            MetaKind::List => match &e {
                Sexp::Bracket { items, .. } => {
                    Binding::List(items.iter().map(|i| self.formula(i)).collect::<Result<_, _>>()?)
                }
                _ => return self.err(format!("'{k}' expects [f1 ... fn]")),
            },
            MetaKind::Context => {
                let c = self.syn(self.p.context(&e))?;
                if let Err(e) = sortcheck::context_sort(self.p.sig, &c) {
                    return self.err(e.to_string());
                }
                Binding::Context(c)
            }
        })
    }

    fn justification(&self, text: &str) -> Result<Justification, PrfError> {
        let text = text.trim();
        let (kw, rest) = text.split_once(char::is_whitespace).unwrap_or((text, ""));
        let rest = rest.trim();
        let mut toks = rest.split_whitespace();
        let j = match kw {
            "hyp" => match toks.next() {
                Some(name) => Justification::Hyp(name.to_string()),
                None => return self.err("hyp needs a name"),
            },
            "ax" => {
                let (name, block) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                let Some(scheme) = SchemeId::parse(name) else {
                    return self.err(format!("unknown scheme '{name}'"));
                };
                let mut bindings = Bindings::new();
                for (k, v) in self.block(block)? {
                    bindings.insert(k.to_string(), self.binding(k, v)?);
                }
                Justification::Axiom(SchemeInstance { scheme, bindings })
            }
            "thax" => {
                let (name, block) = rest.split_once(char::is_whitespace).unwrap_or((rest, ""));
                if name.is_empty() {
                    return self.err("thax needs an axiom name");
                }
                let mut params = Params::new();
                for (k, v) in self.block(block)? {
                    params.insert(k.to_string(), self.formula_text(v)?);
                }
                Justification::TheoryAxiom { name: name.to_string(), params }
            }
            "mp" => {
                let i = self.number(toks.next(), "a line index")?;
                let j = self.number(toks.next(), "a line index")?;
                Justification::Mp(i, j)
            }
            "ug" => {
                let op = toks.next().map(Into::into);
                let pos = self.number(toks.next(), "a position")?;
                let premise = self.number(toks.next(), "a line index")?;
                let Some(op) = op else { return self.err("ug needs an operator") };
                let side_text = rest.find('[').map(|k| &rest[k..]).unwrap_or("");
                let sides = if side_text.is_empty() {
                    vec![]
                } else {
                    match self.syn(sexp::parse_one(side_text))? {
                        Sexp::Bracket { items, .. } => items.iter().map(|i| self.formula(i)).collect::<Result<_, _>>()?,
                        _ => return self.err("expected [side formulas]"),
                    }
                };
                Justification::Ug { op, pos, premise, sides }
            }
            "gen" | "genat" | "paste0" | "paste1" => {
                let sym = self.state(toks.next())?;
                let premise = self.number(toks.next(), "a line index")?;
                match kw {
                    "gen" => Justification::Gen { var: sym, premise },
                    "genat" => Justification::GenAt { sym, premise },
                    "paste0" => Justification::Paste0 { y: sym, premise },
                    _ => Justification::Paste1 { y: sym, premise },
                }
            }
            "bcast" => {
                let name = toks.next().unwrap_or("");
                let Some(sort) = self.p.sig.sort(name) else { return self.err(format!("unknown sort '{name}'")) };
                let premise = self.number(toks.next(), "a line index")?;
                Justification::Broadcast { sort, premise }
            }
            other => return self.err(format!("unknown justification '{other}'")),
        };
        Ok(j)
    }
}

pub fn parse_prf(sig: &Signature, tab: &SymbolTable, text: &str) -> Result<Vec<ProofLine>, PrfError> {
    let mut out = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lp = LineParser { p: Parser::new(sig, tab), line: k + 1 };
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let Some(q1) = trimmed.find('"') else { return lp.err("expected a quoted formula") };
        let Some(len) = trimmed[q1 + 1..].find('"') else { return lp.err("unterminated formula") };
        let q2 = q1 + 1 + len;
        let mut head = trimmed[..q1].split_whitespace();
        let index = lp.number(head.next(), "a line index")?;
        let sort_name = head.next().unwrap_or("");
        let Some(sort) = sig.sort(sort_name) else { return lp.err(format!("unknown sort '{sort_name}'")) };
        if head.next().is_some() {
            return lp.err("expected <idx> <sort> before the formula");
        }
        let formula = lp.formula_text(&trimmed[q1 + 1..q2])?;
        let tail = &trimmed[q2 + 1..];
        let (just, note) = match tail.find('#') {
            Some(h) => (&tail[..h], Some(tail[h + 1..].trim().to_string())),
            None => (tail, None),
        };
        let just = lp.justification(just)?;
        out.push(ProofLine { index, sort, formula, just, note });
    }
    Ok(out)
}

fn write_binding(b: &Binding) -> String {
    match b {
        Binding::Formula(f) => print_formula(f),
        Binding::State(z) => z.name.to_string(),
        Binding::Sort(s) => s.to_string(),
        Binding::Op(o) => o.name.to_string(),
        Binding::Pos(p) => p.to_string(),
        Binding::List(fs) => format!("[{}]", fs.iter().map(print_formula).collect::<Vec<_>>().join(" ")),
        Binding::Context(c) => print_context(c),
    }
}

pub fn write_just(j: &Justification) -> String {
    match j {
        Justification::Hyp(n) => format!("hyp {n}"),
        Justification::Axiom(inst) => {
            let mut s = format!("ax {} {{", inst.scheme);
            // metavariable order, not map order
            let items: Vec<String> = inst
                .scheme
                .metavars()
                .iter()
                .filter_map(|k| inst.bindings.get(*k).map(|b| format!("{k}={}", write_binding(b))))
                .collect();
            s.push_str(&items.join("; "));
            s.push('}');
            s
        }
        Justification::TheoryAxiom { name, params } => {
            let items: Vec<String> = params.iter().map(|(k, f)| format!("{k}={}", print_formula(f))).collect();
            format!("thax {name} {{{}}}", items.join("; "))
        }
        Justification::Mp(i, j) => format!("mp {i} {j}"),
        Justification::Ug { op, pos, premise, sides } => {
            let mut s = format!("ug {op} {pos} {premise}");
            if !sides.is_empty() {
                let _ = write!(s, " [{}]", sides.iter().map(print_formula).collect::<Vec<_>>().join(" "));
            }
            s
        }
        Justification::Gen { var, premise } => format!("gen {} {premise}", var.name),
        Justification::GenAt { sym, premise } => format!("genat {} {premise}", sym.name),
        Justification::Broadcast { sort, premise } => format!("bcast {sort} {premise}"),
        Justification::Paste0 { y, premise } => format!("paste0 {} {premise}", y.name),
        Justification::Paste1 { y, premise } => format!("paste1 {} {premise}", y.name),
    }
}

pub fn write_prf(lines: &[ProofLine]) -> String {
    let mut out = String::new();
    for l in lines {
        let _ = write!(out, "{} {} \"{}\" {}", l.index, l.sort, print_formula(&l.formula), write_just(&l.just));
        if let Some(n) = &l.note {
            let _ = write!(out, " # {n}");
        }
        out.push('\n');
    }
    out
}
