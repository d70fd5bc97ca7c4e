//! Concrete syntax for formulas and contexts: fully parenthesised prefix form.
//!
//! ```text
//! (not f) (or f g) (and f g) (-> f g) (<-> f g)
//! (op <name> f1 ... fn) (box <name> f1 ... fn)
//! (@ <statesym> <resultSort> f) (forall <svar> f) (exists <svar> f)
//! true:<sort> false:<sort> <identifier>
//! ```
//!
//! Sugar expands at parse time. The printer re-sugars `and`, `->`, `<->`
//! and `exists`; boxes and `false` print expanded.

use crate::context::Context;
use crate::formula::Formula;
use crate::sexp::{self, Sexp, SyntaxError};
use crate::signature::{Signature, Sort, StateSymbol, SymbolKind, SymbolTable};
use crate::sortcheck::{self, SortError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FormulaError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error(transparent)]
    Sort(#[from] SortError),
}

pub struct Parser<'a> {
    pub sig: &'a Signature,
    pub tab: &'a SymbolTable,
}

fn err(e: &Sexp, msg: impl Into<String>) -> SyntaxError {
    SyntaxError::new(e.pos(), msg)
}

impl<'a> Parser<'a> {
    pub fn new(sig: &'a Signature, tab: &'a SymbolTable) -> Self {
        Self { sig, tab }
    }

    fn sort_atom(&self, e: &Sexp) -> Result<Sort, SyntaxError> {
        let name = e.as_atom().ok_or_else(|| err(e, "expected a sort name"))?;
        self.sig.sort(name).ok_or_else(|| err(e, format!("unknown sort '{name}'")))
    }

    pub fn state_symbol(&self, e: &Sexp) -> Result<StateSymbol, SyntaxError> {
        let name = e.as_atom().ok_or_else(|| err(e, "expected a state symbol"))?;
        self.tab
            .state_symbol(name)
            .ok_or_else(|| err(e, format!("'{name}' is not a nominal or state variable")))
    }

    fn svar(&self, e: &Sexp) -> Result<StateSymbol, SyntaxError> {
        let s = self.state_symbol(e)?;
        if !s.is_var() {
            return Err(err(e, format!("'{}' is a nominal; only state variables can be bound", s.name)));
        }
        Ok(s)
    }

    fn sorted_constant(&self, e: &Sexp, text: &str) -> Result<Option<Formula>, SyntaxError> {
        for (kw, neg) in [("true:", false), ("false:", true)] {
            if let Some(rest) = text.strip_prefix(kw) {
                let s = self.sig.sort(rest).ok_or_else(|| err(e, format!("unknown sort '{rest}'")))?;
                let top = Formula::top(s);
                return Ok(Some(if neg { Formula::not(top) } else { top }));
            }
        }
        Ok(None)
    }

    /// Builds the AST without sort checking (operator result sorts are taken
    /// from the signature).
    pub fn formula(&self, e: &Sexp) -> Result<Formula, SyntaxError> {
        match e {
            Sexp::Atom { text, .. } => {
                if let Some(c) = self.sorted_constant(e, text)? {
                    return Ok(c);
                }
                match self.tab.lookup(text) {
                    Some((SymbolKind::Prop, s)) => Ok(Formula::prop(text, s.clone())),
                    Some((SymbolKind::Nominal, s)) => Ok(Formula::nom(text, s.clone())),
                    Some((SymbolKind::StateVar, s)) => Ok(Formula::svar(text, s.clone())),
                    None => Err(err(e, format!("unknown symbol '{text}'"))),
                }
            }
            Sexp::Bracket { .. } => Err(err(e, "unexpected '['")),
            Sexp::List { items, .. } => {
                let Some(head) = items.first().and_then(Sexp::as_atom) else {
                    return Err(err(e, "expected a connective"));
                };
                let args = &items[1..];
                let want = |n: usize| -> Result<(), SyntaxError> {
                    if args.len() == n {
                        Ok(())
                    } else {
                        Err(err(e, format!("'{head}' takes {n} arguments, found {}", args.len())))
                    }
                };
                match head {
                    "not" => {
                        want(1)?;
                        Ok(Formula::not(self.formula(&args[0])?))
                    }
                    "or" | "and" | "->" | "<->" => {
                        want(2)?;
                        let a = self.formula(&args[0])?;
                        let b = self.formula(&args[1])?;
                        Ok(match head {
                            "or" => Formula::or(a, b),
                            "and" => Formula::and(a, b),
                            "->" => Formula::implies(a, b),
                            _ => Formula::iff(a, b),
                        })
                    }
                    "op" | "box" => {
                        let Some(name_e) = args.first() else {
                            return Err(err(e, format!("'{head}' needs an operator name")));
                        };
                        let name = name_e.as_atom().ok_or_else(|| err(name_e, "expected an operator name"))?;
                        let op = self
                            .sig
                            .op(name)
                            .ok_or_else(|| err(name_e, format!("unknown operator '{name}'")))?;
                        let fs = args[1..].iter().map(|a| self.formula(a)).collect::<Result<Vec<_>, _>>()?;
                        if fs.len() != op.arity() {
                            return Err(err(
                                e,
                                format!("operator '{name}' takes {} arguments, found {}", op.arity(), fs.len()),
                            ));
                        }
                        Ok(if head == "op" { Formula::app(op, fs) } else { Formula::boxed(op, fs) })
                    }
                    "@" => {
                        want(3)?;
                        let z = self.state_symbol(&args[0])?;
                        let s = self.sort_atom(&args[1])?;
                        Ok(Formula::at(z, s, self.formula(&args[2])?))
                    }
                    "forall" | "exists" => {
                        want(2)?;
                        let x = self.svar(&args[0])?;
                        let body = self.formula(&args[1])?;
                        Ok(if head == "forall" { Formula::forall(x, body) } else { Formula::exists(x, body) })
                    }
                    other => Err(err(&items[0], format!("unknown connective '{other}'"))),
                }
            }
        }
    }

    pub fn context(&self, e: &Sexp) -> Result<Context, SyntaxError> {
        match e {
            Sexp::Atom { text, .. } => {
                if let Some(rest) = text.strip_prefix("hole:") {
                    let s = self.sig.sort(rest).ok_or_else(|| err(e, format!("unknown sort '{rest}'")))?;
                    Ok(Context::Hole(s))
                } else if let Some(rest) = text.strip_prefix("true:") {
                    let s = self.sig.sort(rest).ok_or_else(|| err(e, format!("unknown sort '{rest}'")))?;
                    Ok(Context::Top(s))
                } else {
                    Err(err(e, "expected hole:<sort>, true:<sort> or (op ...)"))
                }
            }
            Sexp::List { items, .. } if items.first().and_then(Sexp::as_atom) == Some("op") && items.len() >= 2 => {
                let name = items[1].as_atom().ok_or_else(|| err(&items[1], "expected an operator name"))?;
                let op = self.sig.op(name).ok_or_else(|| err(&items[1], format!("unknown operator '{name}'")))?;
                let args = items[2..].iter().map(|a| self.context(a)).collect::<Result<Vec<_>, _>>()?;
                if args.len() != op.arity() {
                    return Err(err(e, format!("operator '{name}' takes {} arguments", op.arity())));
                }
                Ok(Context::op(op, args))
            }
            _ => Err(err(e, "malformed context")),
        }
    }
}

/// Parses and sort-checks a formula.
pub fn parse_formula(sig: &Signature, tab: &SymbolTable, text: &str) -> Result<Formula, FormulaError> {
    let e = sexp::parse_one(text)?;
    let f = Parser::new(sig, tab).formula(&e)?;
    sortcheck::sort_of(sig, tab, &f)?;
    Ok(f)
}

pub fn parse_context(sig: &Signature, tab: &SymbolTable, text: &str) -> Result<Context, FormulaError> {
    let e = sexp::parse_one(text)?;
    let c = Parser::new(sig, tab).context(&e)?;
    sortcheck::context_sort(sig, &c)?;
    Ok(c)
}

pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

fn write_formula(f: &Formula, out: &mut String) {
    let bin = |kw: &str, a: &Formula, b: &Formula, out: &mut String| {
        out.push('(');
        out.push_str(kw);
        out.push(' ');
        write_formula(a, out);
        out.push(' ');
        write_formula(b, out);
        out.push(')');
    };
    if let Some((a, b)) = f.as_iff() {
        return bin("<->", a, b, out);
    }
    if let Some((a, b)) = f.as_and() {
        return bin("and", a, b, out);
    }
    if let Some((x, body)) = f.as_exists() {
        out.push_str("(exists ");
        out.push_str(&x.name);
        out.push(' ');
        write_formula(body, out);
        out.push(')');
        return;
    }
    if let Some((a, b)) = f.as_implies() {
        return bin("->", a, b, out);
    }
    match f {
        Formula::Top(s) => {
            out.push_str("true:");
            out.push_str(s.name());
        }
        Formula::Prop { name, .. } | Formula::Nom { name, .. } | Formula::SVar { name, .. } => out.push_str(name),
        Formula::Not(a) => {
            out.push_str("(not ");
            write_formula(a, out);
            out.push(')');
        }
        Formula::Or(a, b) => bin("or", a, b, out),
        Formula::App { op, args, .. } => {
            out.push_str("(op ");
            out.push_str(op);
            for a in args {
                out.push(' ');
                write_formula(a, out);
            }
            out.push(')');
        }
        Formula::At { sym, sort, body } => {
            out.push_str("(@ ");
            out.push_str(&sym.name);
            out.push(' ');
            out.push_str(sort.name());
            out.push(' ');
            write_formula(body, out);
            out.push(')');
        }
        Formula::Forall { var, body } => {
            out.push_str("(forall ");
            out.push_str(&var.name);
            out.push(' ');
            write_formula(body, out);
            out.push(')');
        }
    }
}

pub fn print_context(c: &Context) -> String {
    match c {
        Context::Hole(s) => format!("hole:{s}"),
        Context::Top(s) => format!("true:{s}"),
        Context::Op { op, args, .. } => {
            let mut out = format!("(op {op}");
            for a in args {
                out.push(' ');
                out.push_str(&print_context(a));
            }
            out.push(')');
            out
        }
    }
}

/// Collapses runs of whitespace and strips spaces next to parentheses.
pub fn normalize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = true;
            continue;
        }
        if pending_space && !out.is_empty() && !out.ends_with('(') && !out.ends_with('[') && c != ')' && c != ']' {
            out.push(' ');
        }
        pending_space = false;
        out.push(c);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_sig;

    fn setup() -> (Signature, SymbolTable) {
        parse_sig(
            "sort s\nsort t\nop f : s t -> s\nop c : -> t\nprop p : s\nprop q : t\nnom j : t\nnom k : t\nsvar x : t\nsvar y : s\n",
        )
        .unwrap()
    }

    #[test]
    fn at_example() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(@ j s (not k))").unwrap();
        assert_eq!(
            f,
            Formula::at(
                StateSymbol::nominal("j", "t".into()),
                "s".into(),
                Formula::not(Formula::nom("k", "t".into()))
            )
        );
    }

    #[test]
    fn exists_is_sugar() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(exists x q)").unwrap();
        let x = StateSymbol::var("x", "t".into());
        assert_eq!(f, Formula::not(Formula::forall(x, Formula::not(Formula::prop("q", "t".into())))));
        assert_eq!(print_formula(&f), "(exists x q)");
    }

    #[test]
    fn sugar_reprints() {
        let (sig, tab) = setup();
        for t in [
            "(and p (-> p y))",
            "(<-> (op f p (op c)) p)",
            "(forall x (@ x s (or q (not x))))",
            "(op f true:s (op c))",
        ] {
            let f = parse_formula(&sig, &tab, t).unwrap();
            assert_eq!(print_formula(&f), t);
        }
    }

    #[test]
    fn boxes_print_expanded() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(box f p q)").unwrap();
        assert_eq!(print_formula(&f), "(not (op f (not p) (not q)))");
        let g = parse_formula(&sig, &tab, "false:s").unwrap();
        assert_eq!(print_formula(&g), "(not true:s)");
    }

    #[test]
    fn errors() {
        let (sig, tab) = setup();
        assert!(matches!(parse_formula(&sig, &tab, "(or p"), Err(FormulaError::Syntax(_))));
        assert!(matches!(parse_formula(&sig, &tab, "(or p q)"), Err(FormulaError::Sort(_))));
        assert!(matches!(parse_formula(&sig, &tab, "(forall j q)"), Err(FormulaError::Syntax(_))));
        let e = parse_formula(&sig, &tab, "(and p zz)").unwrap_err();
        assert_eq!(e, FormulaError::Syntax(SyntaxError::new(7, "unknown symbol 'zz'")));
    }

    #[test]
    fn contexts() {
        let (sig, tab) = setup();
        let c = parse_context(&sig, &tab, "(op f hole:s true:t)").unwrap();
        assert!(c.is_nominal());
        assert_eq!(print_context(&c), "(op f hole:s true:t)");
        assert!(parse_context(&sig, &tab, "(op f hole:t true:t)").is_err());
    }

    #[test]
    fn whitespace_normalisation() {
        assert_eq!(normalize_whitespace("( or  p\n q )"), "(or p q)");
    }
}
