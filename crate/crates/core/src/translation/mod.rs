//! The standard translation into many-sorted first-order logic, a
//! first-order evaluator over finite structures, and the correspondence
//! check between the two semantics.

mod export;

use std::collections::{BTreeMap, BTreeSet};

use crate::formula::Formula;
use crate::semantics::{Assignment, EvalError, Model, World};
use crate::signature::{Ident, Sort, StateKind, StateSymbol};

pub use export::{export_fo, parse_fo, FoParseError};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FOTerm {
    Var { name: Ident, sort: Sort },
    /// `c_j` for the nominal `j`.
    Const { nominal: Ident, sort: Sort },
}

impl FOTerm {
    pub fn var(name: &str, sort: Sort) -> Self {
        FOTerm::Var { name: name.into(), sort }
    }

    pub fn sort(&self) -> &Sort {
        match self {
            FOTerm::Var { sort, .. } | FOTerm::Const { sort, .. } => sort,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FOFormula {
    Eq(FOTerm, FOTerm),
    /// `P_p(t)`.
    Pred { prop: Ident, arg: FOTerm },
    /// `R_σ(t, t1, …, tn)`; `args[0]` is the source.
    Rel { op: Ident, args: Vec<FOTerm> },
    Not(Box<FOFormula>),
    Or(Box<FOFormula>, Box<FOFormula>),
    /// Kept primitive so the σ clause reads as written.
    And(Box<FOFormula>, Box<FOFormula>),
    Exists { var: Ident, sort: Sort, body: Box<FOFormula> },
    Forall { var: Ident, sort: Sort, body: Box<FOFormula> },
}

impl FOFormula {
    pub fn free_vars(&self) -> BTreeSet<(Ident, Sort)> {
        fn go(f: &FOFormula, bound: &mut Vec<Ident>, out: &mut BTreeSet<(Ident, Sort)>) {
            let mut term = |t: &FOTerm, bound: &Vec<Ident>| {
                if let FOTerm::Var { name, sort } = t {
                    if !bound.contains(name) {
                        out.insert((name.clone(), sort.clone()));
                    }
                }
            };
            match f {
                FOFormula::Eq(a, b) => {
                    term(a, bound);
                    term(b, bound);
                }
                FOFormula::Pred { arg, .. } => term(arg, bound),
                FOFormula::Rel { args, .. } => args.iter().for_each(|t| term(t, bound)),
                FOFormula::Not(a) => go(a, bound, out),
                FOFormula::Or(a, b) | FOFormula::And(a, b) => {
                    go(a, bound, out);
                    go(b, bound, out);
                }
                FOFormula::Exists { var, body, .. } | FOFormula::Forall { var, body, .. } => {
                    bound.push(var.clone());
                    go(body, bound, out);
                    bound.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Variables bound twice along some root-to-leaf path.
    pub fn rebound_vars(&self) -> BTreeSet<Ident> {
        fn go(f: &FOFormula, path: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
            match f {
                FOFormula::Eq(..) | FOFormula::Pred { .. } | FOFormula::Rel { .. } => {}
                FOFormula::Not(a) => go(a, path, out),
                FOFormula::Or(a, b) | FOFormula::And(a, b) => {
                    go(a, path, out);
                    go(b, path, out);
                }
                FOFormula::Exists { var, body, .. } | FOFormula::Forall { var, body, .. } => {
                    if path.contains(var) {
                        out.insert(var.clone());
                    }
                    path.push(var.clone());
                    go(body, path, out);
                    path.pop();
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TranslateError {
    #[error("pivot has sort {pivot} but the formula has sort {formula}")]
    SortMismatch { pivot: Sort, formula: Sort },
    #[error("pivot '{0}' clashes with a state variable of the formula")]
    PivotClash(String),
}

/// Fresh names `y1, y2, …`, skipping reserved names.
#[derive(Debug, Clone, Default)]
pub struct VarSupply {
    next: usize,
    reserved: BTreeSet<String>,
}

impl VarSupply {
    pub fn new(reserved: impl IntoIterator<Item = String>) -> Self {
        VarSupply { next: 0, reserved: reserved.into_iter().collect() }
    }

    /// Reserves every state-variable name of `f`.
    pub fn for_formula(f: &Formula) -> Self {
        VarSupply::new(f.state_symbols().into_iter().filter(|z| z.kind == StateKind::Var).map(|z| z.name.to_string()))
    }

    pub fn reserve(&mut self, name: &str) {
        self.reserved.insert(name.to_string());
    }

    pub fn fresh(&mut self) -> Ident {
        loop {
            self.next += 1;
            let name = format!("y{}", self.next);
            if self.reserved.insert(name.clone()) {
                return name.into();
            }
        }
    }
}

fn state_term(z: &StateSymbol) -> FOTerm {
    match z.kind {
        StateKind::Nominal => FOTerm::Const { nominal: z.name.clone(), sort: z.sort.clone() },
        StateKind::Var => FOTerm::Var { name: z.name.clone(), sort: z.sort.clone() },
    }
}

fn and(a: FOFormula, b: FOFormula) -> FOFormula {
    FOFormula::And(Box::new(a), Box::new(b))
}

/// `ST_t(φ)` with fresh variables from `supply`.
pub fn standard_translate(f: &Formula, t: &FOTerm, supply: &mut VarSupply) -> Result<FOFormula, TranslateError> {
    if t.sort() != f.sort() {
        return Err(TranslateError::SortMismatch { pivot: t.sort().clone(), formula: f.sort().clone() });
    }
    Ok(st(f, t, supply, &mut Vec::new()))
}

/// `bound` holds the binder names on the path from the root, so shadowing
/// binders get fresh names and no variable is bound twice along a path.
fn st(f: &Formula, t: &FOTerm, supply: &mut VarSupply, bound: &mut Vec<Ident>) -> FOFormula {
    match f {
        // no ⊤ in the first-order vocabulary; t = t is its translation
        Formula::Top(_) => FOFormula::Eq(t.clone(), t.clone()),
        Formula::Prop { name, .. } => FOFormula::Pred { prop: name.clone(), arg: t.clone() },
        Formula::Nom { name, sort } => {
            FOFormula::Eq(t.clone(), FOTerm::Const { nominal: name.clone(), sort: sort.clone() })
        }
        Formula::SVar { name, sort } => FOFormula::Eq(t.clone(), FOTerm::Var { name: name.clone(), sort: sort.clone() }),
        Formula::Not(a) => FOFormula::Not(Box::new(st(a, t, supply, bound))),
        Formula::Or(a, b) => FOFormula::Or(Box::new(st(a, t, supply, bound)), Box::new(st(b, t, supply, bound))),
        Formula::App { op, args, .. } => {
            let ys: Vec<FOTerm> = args.iter().map(|a| FOTerm::Var { name: supply.fresh(), sort: a.sort().clone() }).collect();
            let mut rel_args = vec![t.clone()];
            rel_args.extend(ys.iter().cloned());
            let mut body = FOFormula::Rel { op: op.clone(), args: rel_args };
            let parts: Vec<FOFormula> = args.iter().zip(&ys).map(|(a, y)| st(a, y, supply, bound)).collect();
            if let Some(conj) = parts.into_iter().rev().reduce(|acc, p| and(p, acc)) {
                body = and(body, conj);
            }
            for y in ys.into_iter().rev() {
                let FOTerm::Var { name, sort } = y else { unreachable!() };
                body = FOFormula::Exists { var: name, sort, body: Box::new(body) };
            }
            body
        }
        Formula::At { sym, body, .. } => st(body, &state_term(sym), supply, bound),
        Formula::Forall { var, body } => {
            // a pivot named like the binder would be captured, and an outer
            // binder of the same name would be shadowed: rename the binder
            let clash = matches!(t, FOTerm::Var { name, .. } if *name == var.name) || bound.contains(&var.name);
            let (var, body) = if clash {
                let fresh = StateSymbol::var(&supply.fresh(), var.sort.clone());
                let renamed = body.substitute(var, &fresh).expect("fresh names are never captured");
                (fresh, renamed)
            } else {
                (var.clone(), (**body).clone())
            };
            bound.push(var.name.clone());
            let inner = st(&body, t, supply, bound);
            bound.pop();
            FOFormula::Forall { var: var.name, sort: var.sort, body: Box::new(inner) }
        }
    }
}

/// `ST_x(φ)` with a variable pivot named `pivot`.
pub fn translate_at(f: &Formula, pivot: &str) -> Result<FOFormula, TranslateError> {
    let mut supply = VarSupply::for_formula(f);
    if f.state_symbols().iter().any(|z| z.kind == StateKind::Var && &*z.name == pivot) {
        return Err(TranslateError::PivotClash(pivot.to_string()));
    }
    supply.reserve(pivot);
    standard_translate(f, &FOTerm::var(pivot, f.sort().clone()), &mut supply)
}

/// A pivot name not used by `f`: `x` unless taken.
pub fn default_pivot(f: &Formula) -> String {
    let names: BTreeSet<String> = f.state_symbols().into_iter().map(|z| z.name.to_string()).collect();
    let mut p = "x".to_string();
    while names.contains(&p) {
        p.push('\'');
    }
    p
}

/// A finite first-order structure, read off a model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FOStructure {
    pub domains: BTreeMap<Sort, usize>,
    pub preds: BTreeMap<Ident, BTreeSet<World>>,
    pub rels: BTreeMap<Ident, BTreeSet<Vec<World>>>,
    pub consts: BTreeMap<Ident, World>,
}

impl FOStructure {
    pub fn from_model(m: &Model) -> Self {
        FOStructure {
            domains: m.sorts().map(|s| (s.clone(), m.size(s))).collect(),
            preds: m.props().map(|(p, _)| (p.clone(), m.prop_extension(p).into_iter().collect())).collect(),
            rels: m
                .relations()
                .map(|(op, r)| {
                    let tuples = r
                        .tuples()
                        .map(|(w, t)| {
                            let mut v = vec![w];
                            v.extend_from_slice(t);
                            v
                        })
                        .collect();
                    (op.clone(), tuples)
                })
                .collect(),
            consts: m.noms().map(|(j, _, w)| (j.clone(), w)).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FOEvalError {
    #[error("unbound variable '{0}'")]
    UnboundVariable(String),
    #[error("unknown symbol '{0}'")]
    UnknownSymbol(String),
    #[error("unknown sort '{0}'")]
    UnknownSort(Sort),
}

pub type Env = BTreeMap<Ident, World>;

/// Classical truth; quantifiers range over the finite domain of their sort.
pub fn eval_fo(a: &FOStructure, env: &Env, f: &FOFormula) -> Result<bool, FOEvalError> {
    let mut env = env.clone();
    eval(a, &mut env, f)
}

fn term(a: &FOStructure, env: &Env, t: &FOTerm) -> Result<World, FOEvalError> {
    match t {
        FOTerm::Var { name, .. } => env.get(name).copied().ok_or_else(|| FOEvalError::UnboundVariable(name.to_string())),
        FOTerm::Const { nominal, .. } => {
            a.consts.get(nominal).copied().ok_or_else(|| FOEvalError::UnknownSymbol(format!("c_{nominal}")))
        }
    }
}

fn eval(a: &FOStructure, env: &mut Env, f: &FOFormula) -> Result<bool, FOEvalError> {
    Ok(match f {
        FOFormula::Eq(s, t) => term(a, env, s)? == term(a, env, t)?,
        FOFormula::Pred { prop, arg } => {
            let ext = a.preds.get(prop).ok_or_else(|| FOEvalError::UnknownSymbol(format!("P_{prop}")))?;
            ext.contains(&term(a, env, arg)?)
        }
        FOFormula::Rel { op, args } => {
            let r = a.rels.get(op).ok_or_else(|| FOEvalError::UnknownSymbol(format!("R_{op}")))?;
            let v = args.iter().map(|t| term(a, env, t)).collect::<Result<Vec<_>, _>>()?;
            r.contains(&v)
        }
        FOFormula::Not(x) => !eval(a, env, x)?,
        FOFormula::Or(x, y) => eval(a, env, x)? || eval(a, env, y)?,
        FOFormula::And(x, y) => eval(a, env, x)? && eval(a, env, y)?,
        FOFormula::Exists { var, sort, body } | FOFormula::Forall { var, sort, body } => {
            let exists = matches!(f, FOFormula::Exists { .. });
            let n = *a.domains.get(sort).ok_or_else(|| FOEvalError::UnknownSort(sort.clone()))?;
            let saved = env.remove(var);
            let mut result = !exists;
            for w in 0..n {
                env.insert(var.clone(), w);
                let r = eval(a, env, body);
                let r = match r {
                    Ok(r) => r,
                    Err(e) => {
                        restore(env, var, saved);
                        return Err(e);
                    }
                };
                if r == exists {
                    result = exists;
                    break;
                }
            }
            restore(env, var, saved);
            result
        }
    })
}

fn restore(env: &mut Env, var: &Ident, saved: Option<World>) {
    env.remove(var);
    if let Some(w) = saved {
        env.insert(var.clone(), w);
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CorrespondenceError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    FO(#[from] FOEvalError),
    #[error(transparent)]
    Translate(#[from] TranslateError),
}

/// Both sides of the local correspondence: `(M,g,w ⊨ φ, M ⊨ ST_x(φ)[x ↦ w, g])`.
pub fn correspondence_sides(m: &Model, g: &Assignment, w: World, f: &Formula) -> Result<(bool, bool), CorrespondenceError> {
    let modal = m.satisfies(g, w, f)?;
    let pivot = default_pivot(f);
    let st = translate_at(f, &pivot)?;
    let mut env: Env = g.iter().map(|(n, _, v)| (n.clone(), v)).collect();
    env.insert(pivot.into(), w);
    let fo = eval_fo(&FOStructure::from_model(m), &env, &st)?;
    Ok((modal, fo))
}

pub fn correspondence_check(m: &Model, g: &Assignment, w: World, f: &Formula) -> Result<bool, CorrespondenceError> {
    let (a, b) = correspondence_sides(m, g, w, f)?;
    Ok(a == b)
}

/// Global form for closed `φ`: `(valid in M, M ⊨ ∀x ST_x(φ))`.
pub fn global_sides(m: &Model, f: &Formula) -> Result<(bool, bool), CorrespondenceError> {
    let modal = m.valid(f)?;
    let pivot = default_pivot(f);
    let st = translate_at(f, &pivot)?;
    let closed = FOFormula::Forall { var: pivot.into(), sort: f.sort().clone(), body: Box::new(st) };
    let fo = eval_fo(&FOStructure::from_model(m), &Env::new(), &closed)?;
    Ok((modal, fo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::random::{random_assignment, random_model, rng, Features, FormulaGen, SizeBounds};
    use crate::signature::{parse_sig, Signature, SymbolTable};
    use crate::syntax::parse_formula;
    use rand::Rng;

    fn setup() -> (Signature, SymbolTable) {
        parse_sig("sort s\nsort t\nop sigma : s -> s\nop g : s t -> s\nprop p : s\nprop q : t\nnom j : s\nnom k : t\nsvar v : t\n").unwrap()
    }

    #[test]
    fn paper_clauses() {
        let (sig, tab) = setup();
        let pf = |t: &str| parse_formula(&sig, &tab, t).unwrap();
        assert_eq!(export_fo(&translate_at(&pf("p"), "x").unwrap()), "(pred P_p x)");
        assert_eq!(export_fo(&translate_at(&pf("(@ j s j)"), "x").unwrap()), "(= c_j c_j)");
        assert_eq!(
            export_fo(&translate_at(&pf("(op sigma p)"), "x").unwrap()),
            "(exists (y1:s) (and (rel R_sigma x y1) (pred P_p y1)))"
        );
        assert_eq!(
            export_fo(&translate_at(&pf("(forall v (op g p v))"), "x").unwrap()),
            "(forall (v:t) (exists (y1:s) (exists (y2:t) (and (rel R_g x y1 y2) (and (pred P_p y1) (= y2 v))))))"
        );
    }

    #[test]
    fn pivot_must_not_clash() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(@ v s q)").unwrap();
        assert_eq!(translate_at(&f, "v"), Err(TranslateError::PivotClash("v".into())));
    }

    #[test]
    fn binder_named_like_the_pivot_is_renamed() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(@ v s (forall v q))").unwrap();
        assert_eq!(export_fo(&translate_at(&f, "x").unwrap()), "(forall (y1:t) (pred P_q v))");
    }

    #[test]
    fn shadowing_binder_is_renamed() {
        let (sig, tab) = setup();
        let f = parse_formula(&sig, &tab, "(forall v (or (@ v s q) (forall v (@ v s (not q)))))").unwrap();
        let st = translate_at(&f, "x").unwrap();
        assert!(st.rebound_vars().is_empty());
        assert_eq!(
            export_fo(&st),
            "(forall (v:t) (or (pred P_q v) (forall (y1:t) (not (pred P_q y1)))))"
        );
    }

    #[test]
    fn fresh_variables_avoid_reserved_names() {
        let mut s = VarSupply::new(["y2".to_string()]);
        assert_eq!(&*s.fresh(), "y1");
        assert_eq!(&*s.fresh(), "y3");
    }

    #[test]
    fn random_correspondence() {
        let (sig, tab) = setup();
        let gen = FormulaGen::new(&sig, &tab, Features::FULL);
        let mut r = rng(4);
        for seed in 0..200 {
            let m = random_model(&sig, &tab, &SizeBounds::uniform(3), seed);
            let s = sig.sorts()[r.gen_range(0..2)].clone();
            let f = gen.formula(&s, 4, &mut r);
            let g = random_assignment(&m, &tab, &mut r);
            let w = r.gen_range(0..m.size(&s));
            assert!(correspondence_check(&m, &g, w, &f).unwrap(), "{f}");
            let st = translate_at(&f, "x").unwrap();
            // only binders copied from the modal formula may repeat
            let modal: BTreeSet<Ident> = f.state_symbols().into_iter().map(|z| z.name).collect();
            assert!(st.rebound_vars().is_subset(&modal));
            let free: BTreeSet<Ident> = st.free_vars().into_iter().map(|(n, _)| n).collect();
            let mut allowed: BTreeSet<Ident> = f.free_state_vars().into_iter().map(|z| z.name).collect();
            allowed.insert("x".into());
            assert!(free.is_subset(&allowed));
        }
    }
}
