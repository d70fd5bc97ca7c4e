//! The sorted formula AST over propositions, nominals, state variables,
//! negation, disjunction, operator application, satisfaction operators and
//! the universal binder. Derived connectives are constructors that expand to
//! this core.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::signature::{Ident, Operator, Sort, StateKind, StateSymbol};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Formula {
    /// `⊤_s`; falsum is `¬⊤_s`.
    Top(Sort),
    Prop { name: Ident, sort: Sort },
    Nom { name: Ident, sort: Sort },
    SVar { name: Ident, sort: Sort },
    Not(Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    /// `σ(φ1, …, φn)` with the result sort of `σ`.
    App { op: Ident, sort: Sort, args: Vec<Formula> },
    /// `@_z^s φ`: `φ` and `z` share a sort, `s` is arbitrary.
    At { sym: StateSymbol, sort: Sort, body: Box<Formula> },
    /// `∀x φ`; `var` is always a state variable.
    Forall { var: StateSymbol, body: Box<Formula> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("'{replacement}' is not substitutable for '{var}': a free occurrence lies under a binder for '{replacement}'")]
pub struct NotSubstitutable {
    pub var: String,
    pub replacement: String,
}

impl Formula {
    pub fn top(sort: Sort) -> Self {
        Formula::Top(sort)
    }

    pub fn bot(sort: Sort) -> Self {
        Formula::not(Formula::Top(sort))
    }

    pub fn prop(name: &str, sort: Sort) -> Self {
        Formula::Prop { name: Arc::from(name), sort }
    }

    pub fn nom(name: &str, sort: Sort) -> Self {
        Formula::Nom { name: Arc::from(name), sort }
    }

    pub fn svar(name: &str, sort: Sort) -> Self {
        Formula::SVar { name: Arc::from(name), sort }
    }

    /// The atomic formula naming a state symbol.
    pub fn state(sym: &StateSymbol) -> Self {
        match sym.kind {
            StateKind::Nominal => Formula::Nom { name: sym.name.clone(), sort: sym.sort.clone() },
            StateKind::Var => Formula::SVar { name: sym.name.clone(), sort: sym.sort.clone() },
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// `a ∧ b := ¬(¬a ∨ ¬b)`
    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(a), Formula::not(b)))
    }

    /// `a → b := ¬a ∨ b`
    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::or(Formula::not(a), b)
    }

    /// `a ↔ b := (a → b) ∧ (b → a)`
    pub fn iff(a: Formula, b: Formula) -> Self {
        Formula::and(Formula::implies(a.clone(), b.clone()), Formula::implies(b, a))
    }

    pub fn app(op: &Operator, args: Vec<Formula>) -> Self {
        Formula::App { op: op.name.clone(), sort: op.result.clone(), args }
    }

    /// The dual `σ^□(φ1, …, φn) := ¬σ(¬φ1, …, ¬φn)`.
    pub fn boxed(op: &Operator, args: Vec<Formula>) -> Self {
        Formula::not(Formula::app(op, args.into_iter().map(Formula::not).collect()))
    }

    pub fn at(sym: StateSymbol, sort: Sort, body: Formula) -> Self {
        Formula::At { sym, sort, body: Box::new(body) }
    }

    pub fn forall(var: StateSymbol, body: Formula) -> Self {
        debug_assert!(var.is_var());
        Formula::Forall { var, body: Box::new(body) }
    }

    /// `∃x φ := ¬∀x ¬φ`
    pub fn exists(var: StateSymbol, body: Formula) -> Self {
        Formula::not(Formula::forall(var, Formula::not(body)))
    }

    /// Conjunction of a non-empty list, right-nested.
    pub fn and_all(mut fs: Vec<Formula>) -> Self {
        let last = fs.pop().expect("and_all of empty list");
        fs.into_iter().rev().fold(last, |acc, f| Formula::and(f, acc))
    }

    pub fn sort(&self) -> &Sort {
        match self {
            Formula::Top(s) => s,
            Formula::Prop { sort, .. }
            | Formula::Nom { sort, .. }
            | Formula::SVar { sort, .. }
            | Formula::App { sort, .. }
            | Formula::At { sort, .. } => sort,
            Formula::Not(f) => f.sort(),
            Formula::Or(a, _) => a.sort(),
            Formula::Forall { body, .. } => body.sort(),
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Formula::Top(_) | Formula::Prop { .. } | Formula::Nom { .. } | Formula::SVar { .. } => 0,
            Formula::Not(f) => 1 + f.depth(),
            Formula::Or(a, b) => 1 + a.depth().max(b.depth()),
            // constants are atomic
            Formula::App { args, .. } if args.is_empty() => 0,
            Formula::App { args, .. } => 1 + args.iter().map(Formula::depth).max().unwrap_or(0),
            Formula::At { body, .. } | Formula::Forall { body, .. } => 1 + body.depth(),
        }
    }

    pub fn size(&self) -> usize {
        match self {
            Formula::Top(_) | Formula::Prop { .. } | Formula::Nom { .. } | Formula::SVar { .. } => 1,
            Formula::Not(f) => 1 + f.size(),
            Formula::Or(a, b) => 1 + a.size() + b.size(),
            Formula::App { args, .. } => 1 + args.iter().map(Formula::size).sum::<usize>(),
            Formula::At { body, .. } | Formula::Forall { body, .. } => 1 + body.size(),
        }
    }

    // Sugar recognisers. These look for the exact shapes the constructors build.

    pub fn as_implies(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Or(a, b) => match &**a {
                Formula::Not(a) => Some((a, b)),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_and(&self) -> Option<(&Formula, &Formula)> {
        match self {
            Formula::Not(inner) => match &**inner {
                Formula::Or(a, b) => match (&**a, &**b) {
                    (Formula::Not(a), Formula::Not(b)) => Some((a, b)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    pub fn as_iff(&self) -> Option<(&Formula, &Formula)> {
        let (l, r) = self.as_and()?;
        let (a, b) = l.as_implies()?;
        let (b2, a2) = r.as_implies()?;
        (a == a2 && b == b2).then_some((a, b))
    }

    pub fn as_exists(&self) -> Option<(&StateSymbol, &Formula)> {
        match self {
            Formula::Not(inner) => match &**inner {
                Formula::Forall { var, body } => match &**body {
                    Formula::Not(f) => Some((var, f)),
                    _ => None,
                },
                _ => None,
            },
            _ => None,
        }
    }

    /// `¬σ(¬φ1,…,¬φn)` → `(σ, [φ1,…,φn])`.
    pub fn as_box(&self) -> Option<(&Ident, Vec<&Formula>)> {
        match self {
            Formula::Not(inner) => match &**inner {
                Formula::App { op, args, .. } => {
                    let mut out = Vec::with_capacity(args.len());
                    for a in args {
                        match a {
                            Formula::Not(x) => out.push(&**x),
                            _ => return None,
                        }
                    }
                    Some((op, out))
                }
                _ => None,
            },
            _ => None,
        }
    }

    /// State variables with an occurrence not under a binder for them.
    /// Satisfaction-operator subscripts count as occurrences.
    pub fn free_state_vars(&self) -> BTreeSet<StateSymbol> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        collect_free(self, &mut bound, &mut out);
        out
    }

    pub fn is_closed(&self) -> bool {
        self.free_state_vars().is_empty()
    }

    pub fn has_free(&self, x: &StateSymbol) -> bool {
        self.free_state_vars().contains(x)
    }

    /// Whether `sym` occurs anywhere: as an atom, a subscript, or a binder.
    pub fn occurs(&self, sym: &StateSymbol) -> bool {
        match self {
            Formula::Top(_) | Formula::Prop { .. } => false,
            Formula::Nom { name, sort } => {
                sym.kind == StateKind::Nominal && &sym.name == name && &sym.sort == sort
            }
            Formula::SVar { name, sort } => {
                sym.kind == StateKind::Var && &sym.name == name && &sym.sort == sort
            }
            Formula::Not(f) => f.occurs(sym),
            Formula::Or(a, b) => a.occurs(sym) || b.occurs(sym),
            Formula::App { args, .. } => args.iter().any(|a| a.occurs(sym)),
            Formula::At { sym: z, body, .. } => z == sym || body.occurs(sym),
            Formula::Forall { var, body } => var == sym || body.occurs(sym),
        }
    }

    /// Every state symbol occurring in the formula (including binders).
    pub fn state_symbols(&self) -> BTreeSet<StateSymbol> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Nom { name, sort } => {
                out.insert(StateSymbol { kind: StateKind::Nominal, name: name.clone(), sort: sort.clone() });
            }
            Formula::SVar { name, sort } => {
                out.insert(StateSymbol { kind: StateKind::Var, name: name.clone(), sort: sort.clone() });
            }
            Formula::At { sym, .. } => {
                out.insert(sym.clone());
            }
            Formula::Forall { var, .. } => {
                out.insert(var.clone());
            }
            _ => {}
        });
        out
    }

    /// Propositional variables occurring in the formula, with their sorts.
    pub fn props(&self) -> BTreeSet<(Ident, Sort)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Prop { name, sort } = f {
                out.insert((name.clone(), sort.clone()));
            }
        });
        out
    }

    /// Pre-order traversal.
    pub fn visit<'a>(&'a self, f: &mut impl FnMut(&'a Formula)) {
        f(self);
        match self {
            Formula::Not(a) => a.visit(f),
            Formula::Or(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            Formula::App { args, .. } => args.iter().for_each(|a| a.visit(f)),
            Formula::At { body, .. } | Formula::Forall { body, .. } => body.visit(f),
            _ => {}
        }
    }

    /// `φ[z/x]`: replaces free occurrences of the state variable `x`
    /// (subscripts included) by `z`. Fails instead of renaming when a free
    /// occurrence of `x` sits under a binder for `z`.
    pub fn substitute(&self, x: &StateSymbol, z: &StateSymbol) -> Result<Formula, NotSubstitutable> {
        debug_assert!(x.is_var());
        subst(self, x, z, false).map_err(|()| NotSubstitutable {
            var: x.name.to_string(),
            replacement: z.name.to_string(),
        })
    }
}

fn collect_free(f: &Formula, bound: &mut Vec<StateSymbol>, out: &mut BTreeSet<StateSymbol>) {
    match f {
        Formula::SVar { name, sort } => {
            let s = StateSymbol { kind: StateKind::Var, name: name.clone(), sort: sort.clone() };
            if !bound.contains(&s) {
                out.insert(s);
            }
        }
        Formula::Top(_) | Formula::Prop { .. } | Formula::Nom { .. } => {}
        Formula::Not(a) => collect_free(a, bound, out),
        Formula::Or(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Formula::App { args, .. } => args.iter().for_each(|a| collect_free(a, bound, out)),
        Formula::At { sym, body, .. } => {
            if sym.is_var() && !bound.contains(sym) {
                out.insert(sym.clone());
            }
            collect_free(body, bound, out);
        }
        Formula::Forall { var, body } => {
            bound.push(var.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

// `under` is true when we are inside a binder for the replacement symbol.
fn subst(f: &Formula, x: &StateSymbol, z: &StateSymbol, under: bool) -> Result<Formula, ()> {
    let is_x = |name: &Ident, sort: &Sort| name == &x.name && sort == &x.sort;
    Ok(match f {
        Formula::SVar { name, sort } if is_x(name, sort) => {
            if under {
                return Err(());
            }
            Formula::state(z)
        }
        Formula::Top(_) | Formula::Prop { .. } | Formula::Nom { .. } | Formula::SVar { .. } => f.clone(),
        Formula::Not(a) => Formula::not(subst(a, x, z, under)?),
        Formula::Or(a, b) => Formula::or(subst(a, x, z, under)?, subst(b, x, z, under)?),
        Formula::App { op, sort, args } => Formula::App {
            op: op.clone(),
            sort: sort.clone(),
            args: args.iter().map(|a| subst(a, x, z, under)).collect::<Result<_, _>>()?,
        },
        Formula::At { sym, sort, body } => {
            let sym = if sym == x {
                if under {
                    return Err(());
                }
                z.clone()
            } else {
                sym.clone()
            };
            Formula::At { sym, sort: sort.clone(), body: Box::new(subst(body, x, z, under)?) }
        }
        Formula::Forall { var, body } => {
            if var == x {
                // x is bound here: nothing below is free.
                f.clone()
            } else {
                let under = under || var == z;
                Formula::Forall { var: var.clone(), body: Box::new(subst(body, x, z, under)?) }
            }
        }
    })
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print_formula(self))
    }
}
