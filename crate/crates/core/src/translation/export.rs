//! First-order text: fully parenthesised prefix form with sorted binders.
//!
//! ```text
//! (= t1 t2) (pred P_p t) (rel R_op t t1 ... tn)
//! (not f) (or f g) (and f g) (exists (y1:s) f) (forall (y1:s) f)
//! ```
//!
//! Terms are variable names or `c_<nominal>`.

use std::collections::BTreeMap;

use super::{FOFormula, FOTerm};
use crate::sexp::{self, Sexp, SyntaxError};
use crate::signature::{Ident, Signature, Sort, SymbolKind, SymbolTable};

pub fn export_fo(f: &FOFormula) -> String {
    let mut out = String::new();
    write(f, &mut out);
    out
}

fn write_term(t: &FOTerm, out: &mut String) {
    match t {
        FOTerm::Var { name, .. } => out.push_str(name),
        FOTerm::Const { nominal, .. } => {
            out.push_str("c_");
            out.push_str(nominal);
        }
    }
}

fn write(f: &FOFormula, out: &mut String) {
    match f {
        FOFormula::Eq(a, b) => {
            out.push_str("(= ");
            write_term(a, out);
            out.push(' ');
            write_term(b, out);
            out.push(')');
        }
        FOFormula::Pred { prop, arg } => {
            out.push_str("(pred P_");
            out.push_str(prop);
            out.push(' ');
            write_term(arg, out);
            out.push(')');
        }
        FOFormula::Rel { op, args } => {
            out.push_str("(rel R_");
            out.push_str(op);
            for a in args {
                out.push(' ');
                write_term(a, out);
            }
            out.push(')');
        }
        FOFormula::Not(a) => {
            out.push_str("(not ");
            write(a, out);
            out.push(')');
        }
        FOFormula::Or(a, b) | FOFormula::And(a, b) => {
            out.push_str(if matches!(f, FOFormula::Or(..)) { "(or " } else { "(and " });
            write(a, out);
            out.push(' ');
            write(b, out);
            out.push(')');
        }
        FOFormula::Exists { var, sort, body } | FOFormula::Forall { var, sort, body } => {
            out.push_str(if matches!(f, FOFormula::Exists { .. }) { "(exists (" } else { "(forall (" });
            out.push_str(var);
            out.push(':');
            out.push_str(sort.name());
            out.push_str(") ");
            write(body, out);
            out.push(')');
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FoParseError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("at offset {pos}: {msg}")]
    Bad { pos: usize, msg: String },
}

struct Reader<'a> {
    sig: &'a Signature,
    tab: &'a SymbolTable,
    /// Sorts of variables in scope, innermost last.
    scope: Vec<(Ident, Sort)>,
    free: &'a BTreeMap<String, Sort>,
}

fn bad<T>(e: &Sexp, msg: impl Into<String>) -> Result<T, FoParseError> {
    Err(FoParseError::Bad { pos: e.pos(), msg: msg.into() })
}

impl Reader<'_> {
    fn term(&self, e: &Sexp) -> Result<FOTerm, FoParseError> {
        let Some(text) = e.as_atom() else { return bad(e, "expected a term") };
        if let Some((_, s)) = self.scope.iter().rev().find(|(n, _)| &**n == text) {
            return Ok(FOTerm::var(text, s.clone()));
        }
        if let Some(s) = self.free.get(text) {
            return Ok(FOTerm::var(text, s.clone()));
        }
        if let Some((SymbolKind::StateVar, s)) = self.tab.lookup(text) {
            return Ok(FOTerm::var(text, s.clone()));
        }
        if let Some(j) = text.strip_prefix("c_") {
            if let Some((SymbolKind::Nominal, s)) = self.tab.lookup(j) {
                return Ok(FOTerm::Const { nominal: j.into(), sort: s.clone() });
            }
        }
        bad(e, format!("unknown term '{text}'"))
    }

    fn formula(&mut self, e: &Sexp) -> Result<FOFormula, FoParseError> {
        let Sexp::List { items, .. } = e else { return bad(e, "expected a list") };
        let Some(head) = items.first().and_then(Sexp::as_atom) else { return bad(e, "expected a head symbol") };
        let args = &items[1..];
        let want = |n: usize| if args.len() == n { Ok(()) } else { bad(e, format!("'{head}' takes {n} arguments")) };
        Ok(match head {
            "=" => {
                want(2)?;
                let (a, b) = (self.term(&args[0])?, self.term(&args[1])?);
                if a.sort() != b.sort() {
                    return bad(e, "equality between different sorts");
                }
                FOFormula::Eq(a, b)
            }
            "pred" => {
                want(2)?;
                let name = args[0].as_atom().and_then(|n| n.strip_prefix("P_"));
                let Some((SymbolKind::Prop, s)) = name.and_then(|n| self.tab.lookup(n)) else {
                    return bad(&args[0], "expected P_<prop>");
                };
                let arg = self.term(&args[1])?;
                if arg.sort() != s {
                    return bad(&args[1], "argument sort differs from the predicate's");
                }
                FOFormula::Pred { prop: name.unwrap_or_default().into(), arg }
            }
            "rel" => {
                let name = args.first().and_then(Sexp::as_atom).and_then(|n| n.strip_prefix("R_"));
                let Some(op) = name.and_then(|n| self.sig.op(n)) else { return bad(e, "expected R_<op>") };
                let ts = args[1..].iter().map(|a| self.term(a)).collect::<Result<Vec<_>, _>>()?;
                let mut sorts = vec![&op.result];
                sorts.extend(op.args.iter());
                if ts.len() != sorts.len() || ts.iter().zip(&sorts).any(|(t, s)| t.sort() != *s) {
                    return bad(e, format!("R_{} expects sorts {:?}", op.name, sorts.iter().map(|s| s.name()).collect::<Vec<_>>()));
                }
                FOFormula::Rel { op: op.name.clone(), args: ts }
            }
            "not" => {
                want(1)?;
                FOFormula::Not(Box::new(self.formula(&args[0])?))
            }
            "or" | "and" => {
                want(2)?;
                let a = Box::new(self.formula(&args[0])?);
                let b = Box::new(self.formula(&args[1])?);
                if head == "or" {
                    FOFormula::Or(a, b)
                } else {
                    FOFormula::And(a, b)
                }
            }
            "exists" | "forall" => {
                want(2)?;
                let binder = match &args[0] {
                    Sexp::List { items, .. } if items.len() == 1 => items[0].as_atom(),
                    _ => None,
                };
                let Some((var, sort)) = binder.and_then(|b| b.split_once(':')) else {
                    return bad(&args[0], "expected (<var>:<sort>)");
                };
                let Some(sort) = self.sig.sort(sort) else { return bad(&args[0], format!("unknown sort '{sort}'")) };
                self.scope.push((var.into(), sort.clone()));
                let body = self.formula(&args[1]);
                self.scope.pop();
                let body = Box::new(body?);
                if head == "exists" {
                    FOFormula::Exists { var: var.into(), sort, body }
                } else {
                    FOFormula::Forall { var: var.into(), sort, body }
                }
            }
            other => return bad(e, format!("unknown head '{other}'")),
        })
    }
}

/// Reads exported text back. Free variables are looked up in `free`, then
/// among the state variables of `tab`.
pub fn parse_fo(
    sig: &Signature,
    tab: &SymbolTable,
    free: &BTreeMap<String, Sort>,
    text: &str,
) -> Result<FOFormula, FoParseError> {
    let e = sexp::parse_one(text)?;
    Reader { sig, tab, scope: Vec::new(), free }.formula(&e)
}
