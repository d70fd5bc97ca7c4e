//! Well-sortedness as a checking judgment over the formula grammar.

use crate::context::Context;
use crate::formula::Formula;
use crate::signature::{Signature, Sort, StateKind, SymbolKind, SymbolTable};

/// Path from the root: child indices (`Or` has 0/1, `App` its argument
/// positions, `Not`/`At`/`Forall` the single child 0).
pub type Path = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SortError {
    #[error("sort error at {}: expected {expected}, found {found}", fmt_path(.path))]
    Mismatch { path: Path, expected: Sort, found: Sort },
    #[error("unknown {what} '{name}' at {}", fmt_path(.path))]
    Unknown { path: Path, what: &'static str, name: String },
    #[error("operator '{op}' expects {expected} arguments, found {found} at {}", fmt_path(.path))]
    Arity { path: Path, op: String, expected: usize, found: usize },
}

fn fmt_path(p: &Path) -> String {
    if p.is_empty() {
        "root".to_string()
    } else {
        let parts: Vec<String> = p.iter().map(|i| i.to_string()).collect();
        format!("/{}", parts.join("/"))
    }
}

impl SortError {
    pub fn path(&self) -> &Path {
        match self {
            SortError::Mismatch { path, .. } | SortError::Unknown { path, .. } | SortError::Arity { path, .. } => path,
        }
    }
}

struct Checker<'a> {
    sig: &'a Signature,
    tab: &'a SymbolTable,
    path: Path,
}

impl Checker<'_> {
    fn mismatch(&self, expected: &Sort, found: &Sort) -> SortError {
        SortError::Mismatch { path: self.path.clone(), expected: expected.clone(), found: found.clone() }
    }

    fn unknown(&self, what: &'static str, name: &str) -> SortError {
        SortError::Unknown { path: self.path.clone(), what, name: name.to_string() }
    }

    fn symbol(&self, kind: SymbolKind, name: &str, sort: &Sort) -> Result<(), SortError> {
        let what = match kind {
            SymbolKind::Prop => "proposition",
            SymbolKind::Nominal => "nominal",
            SymbolKind::StateVar => "state variable",
        };
        match self.tab.lookup(name) {
            Some((k, s)) if k == kind => {
                if s == sort {
                    Ok(())
                } else {
                    Err(self.mismatch(s, sort))
                }
            }
            _ => Err(self.unknown(what, name)),
        }
    }

    fn child<T>(&mut self, i: usize, f: impl FnOnce(&mut Self) -> T) -> T {
        self.path.push(i);
        let r = f(self);
        self.path.pop();
        r
    }

    fn infer(&mut self, f: &Formula) -> Result<Sort, SortError> {
        match f {
            Formula::Top(s) => {
                if !self.sig.has_sort(s) {
                    return Err(self.unknown("sort", s.name()));
                }
                Ok(s.clone())
            }
            Formula::Prop { name, sort } => self.symbol(SymbolKind::Prop, name, sort).map(|_| sort.clone()),
            Formula::Nom { name, sort } => self.symbol(SymbolKind::Nominal, name, sort).map(|_| sort.clone()),
            Formula::SVar { name, sort } => self.symbol(SymbolKind::StateVar, name, sort).map(|_| sort.clone()),
            Formula::Not(a) => self.child(0, |c| c.infer(a)),
            Formula::Or(a, b) => {
                let sa = self.child(0, |c| c.infer(a))?;
                let sb = self.child(1, |c| c.infer(b))?;
                if sa != sb {
                    return Err(self.child(1, |c| c.mismatch(&sa, &sb)));
                }
                Ok(sa)
            }
            Formula::App { op, sort, args } => {
                let mut found = Vec::with_capacity(args.len());
                for (i, a) in args.iter().enumerate() {
                    found.push(self.child(i, |c| c.infer(a))?);
                }
                let Some(decl) = self.sig.op(op) else {
                    return Err(self.unknown("operator", op));
                };
                if decl.args.len() != args.len() {
                    return Err(SortError::Arity {
                        path: self.path.clone(),
                        op: op.to_string(),
                        expected: decl.args.len(),
                        found: args.len(),
                    });
                }
                for (i, (want, got)) in decl.args.iter().zip(&found).enumerate() {
                    if want != got {
                        return Err(self.child(i, |c| c.mismatch(want, got)));
                    }
                }
                if &decl.result != sort {
                    return Err(self.mismatch(&decl.result, sort));
                }
                Ok(sort.clone())
            }
            Formula::At { sym, sort, body } => {
                let sb = self.child(0, |c| c.infer(body))?;
                let kind = match sym.kind {
                    StateKind::Nominal => SymbolKind::Nominal,
                    StateKind::Var => SymbolKind::StateVar,
                };
                self.symbol(kind, &sym.name, &sym.sort)?;
                if sb != sym.sort {
                    return Err(self.child(0, |c| c.mismatch(&sym.sort, &sb)));
                }
                if !self.sig.has_sort(sort) {
                    return Err(self.unknown("sort", sort.name()));
                }
                Ok(sort.clone())
            }
            Formula::Forall { var, body } => {
                let sb = self.child(0, |c| c.infer(body))?;
                if !var.is_var() {
                    return Err(self.unknown("state variable", &var.name));
                }
                self.symbol(SymbolKind::StateVar, &var.name, &var.sort)?;
                Ok(sb)
            }
        }
    }
}

/// Checks that `f` is a well-formed formula of sort `s`. On failure the error
/// pinpoints the leftmost-innermost ill-sorted subterm.
pub fn well_sorted(sig: &Signature, tab: &SymbolTable, f: &Formula, s: &Sort) -> Result<(), SortError> {
    let mut c = Checker { sig, tab, path: Vec::new() };
    let found = c.infer(f)?;
    if &found != s {
        return Err(c.mismatch(s, &found));
    }
    Ok(())
}

/// Infers the sort of `f`, checking well-sortedness along the way.
pub fn sort_of(sig: &Signature, tab: &SymbolTable, f: &Formula) -> Result<Sort, SortError> {
    Checker { sig, tab, path: Vec::new() }.infer(f)
}

/// Sort-checks a context, returning its result sort.
pub fn context_sort(sig: &Signature, ctx: &Context) -> Result<Sort, SortError> {
    fn go(sig: &Signature, ctx: &Context, path: &mut Path) -> Result<Sort, SortError> {
        match ctx {
            Context::Hole(s) | Context::Top(s) => {
                if sig.has_sort(s) {
                    Ok(s.clone())
                } else {
                    Err(SortError::Unknown { path: path.clone(), what: "sort", name: s.to_string() })
                }
            }
            Context::Op { op, sort, args } => {
                let Some(decl) = sig.op(op) else {
                    return Err(SortError::Unknown { path: path.clone(), what: "operator", name: op.to_string() });
                };
                if decl.args.len() != args.len() {
                    return Err(SortError::Arity {
                        path: path.clone(),
                        op: op.to_string(),
                        expected: decl.args.len(),
                        found: args.len(),
                    });
                }
                for (i, (a, want)) in args.iter().zip(&decl.args).enumerate() {
                    path.push(i);
                    let got = go(sig, a, path)?;
                    if &got != want {
                        return Err(SortError::Mismatch { path: path.clone(), expected: want.clone(), found: got });
                    }
                    path.pop();
                }
                if &decl.result != sort {
                    return Err(SortError::Mismatch { path: path.clone(), expected: decl.result.clone(), found: sort.clone() });
                }
                Ok(decl.result.clone())
            }
        }
    }
    go(sig, ctx, &mut Vec::new())
}
