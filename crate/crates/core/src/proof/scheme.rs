//! Axiom schemes and their instantiation from explicit bindings.

use std::collections::BTreeMap;
use std::fmt;

use super::taut::{is_tautology, TautError};
use crate::context::{Context, ContextError};
use crate::formula::Formula;
use crate::signature::{Operator, Signature, Sort, StateSymbol, SymbolTable};
use crate::sortcheck::{self, SortError};

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SchemeId {
    TAUT,
    K_SIGMA_AX,
    DUAL,
    K_AT,
    SELFDUAL,
    INTRO,
    AGREE,
    REF,
    BACK,
    Q1,
    Q2,
    NAME,
    BARCAN,
    BARCAN_AT,
    NOM,
    NOM_X,
}

impl SchemeId {
    pub const ALL: [SchemeId; 16] = [
        SchemeId::TAUT,
        SchemeId::K_SIGMA_AX,
        SchemeId::DUAL,
        SchemeId::K_AT,
        SchemeId::SELFDUAL,
        SchemeId::INTRO,
        SchemeId::AGREE,
        SchemeId::REF,
        SchemeId::BACK,
        SchemeId::Q1,
        SchemeId::Q2,
        SchemeId::NAME,
        SchemeId::BARCAN,
        SchemeId::BARCAN_AT,
        SchemeId::NOM,
        SchemeId::NOM_X,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeId::TAUT => "TAUT",
            SchemeId::K_SIGMA_AX => "K_SIGMA_AX",
            SchemeId::DUAL => "DUAL",
            SchemeId::K_AT => "K_AT",
            SchemeId::SELFDUAL => "SELFDUAL",
            SchemeId::INTRO => "INTRO",
            SchemeId::AGREE => "AGREE",
            SchemeId::REF => "REF",
            SchemeId::BACK => "BACK",
            SchemeId::Q1 => "Q1",
            SchemeId::Q2 => "Q2",
            SchemeId::NAME => "NAME",
            SchemeId::BARCAN => "BARCAN",
            SchemeId::BARCAN_AT => "BARCAN_AT",
            SchemeId::NOM => "NOM",
            SchemeId::NOM_X => "NOM_X",
        }
    }

    pub fn parse(name: &str) -> Option<SchemeId> {
        SchemeId::ALL.into_iter().find(|s| s.name() == name)
    }

    /// Metavariables, in the order they are printed.
    pub fn metavars(self) -> &'static [&'static str] {
        match self {
            SchemeId::TAUT => &["phi"],
            SchemeId::K_SIGMA_AX => &["op", "pos", "sides", "phi", "chi"],
            SchemeId::DUAL => &["op", "args"],
            SchemeId::K_AT => &["z", "s", "phi", "psi"],
            SchemeId::SELFDUAL => &["z", "s", "phi"],
            SchemeId::INTRO => &["z", "phi"],
            SchemeId::AGREE => &["y", "z", "t", "phi"],
            SchemeId::REF => &["z", "s"],
            SchemeId::BACK => &["op", "pos", "sides", "z", "psi"],
            SchemeId::Q1 => &["x", "phi", "psi"],
            SchemeId::Q2 => &["x", "y", "phi"],
            SchemeId::NAME => &["x"],
            SchemeId::BARCAN => &["x", "op", "pos", "args"],
            SchemeId::BARCAN_AT => &["x", "z", "s", "phi"],
            SchemeId::NOM => &["x", "eta", "theta", "phi"],
            SchemeId::NOM_X => &["x", "y", "z", "s"],
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The kind of value a metavariable ranges over, fixed by its name.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Formula,
    State,
    Sort,
    Op,
    Pos,
    List,
    Context,
}

pub fn meta_kind(name: &str) -> Option<MetaKind> {
    Some(match name {
        "phi" | "psi" | "chi" => MetaKind::Formula,
        "x" | "y" | "z" => MetaKind::State,
        "s" | "t" => MetaKind::Sort,
        "op" => MetaKind::Op,
        "pos" => MetaKind::Pos,
        "sides" | "args" => MetaKind::List,
        "eta" | "theta" => MetaKind::Context,
        _ => return None,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Binding {
    Formula(Formula),
    State(StateSymbol),
    Sort(Sort),
    Op(Operator),
    /// 1-based argument position.
    Pos(usize),
    List(Vec<Formula>),
    Context(Context),
}

pub type Bindings = BTreeMap<String, Binding>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("missing binding '{0}'")]
    MissingBinding(String),
    #[error("unexpected binding '{0}'")]
    UnexpectedBinding(String),
    #[error("binding '{0}' has the wrong kind")]
    WrongKind(String),
    #[error("argument position {pos} out of range for '{op}'")]
    Position { op: String, pos: usize },
    #[error(transparent)]
    Sort(#[from] SortError),
    #[error(transparent)]
    Context(#[from] ContextError),
    #[error(transparent)]
    Taut(#[from] TautError),
    #[error("{scheme}: side condition fails: {detail}")]
    SideCondition { scheme: SchemeId, detail: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SchemeInstance {
    pub scheme: SchemeId,
    pub bindings: Bindings,
}

impl SchemeInstance {
    pub fn new(scheme: SchemeId) -> Self {
        SchemeInstance { scheme, bindings: Bindings::new() }
    }

    pub fn formula(mut self, k: &str, f: Formula) -> Self {
        self.bindings.insert(k.into(), Binding::Formula(f));
        self
    }

    pub fn state(mut self, k: &str, z: StateSymbol) -> Self {
        self.bindings.insert(k.into(), Binding::State(z));
        self
    }

    pub fn sort(mut self, k: &str, s: Sort) -> Self {
        self.bindings.insert(k.into(), Binding::Sort(s));
        self
    }

    pub fn op(mut self, op: &Operator) -> Self {
        self.bindings.insert("op".into(), Binding::Op(op.clone()));
        self
    }

    pub fn pos(mut self, pos: usize) -> Self {
        self.bindings.insert("pos".into(), Binding::Pos(pos));
        self
    }

    pub fn list(mut self, k: &str, fs: Vec<Formula>) -> Self {
        self.bindings.insert(k.into(), Binding::List(fs));
        self
    }

    pub fn context(mut self, k: &str, c: Context) -> Self {
        self.bindings.insert(k.into(), Binding::Context(c));
        self
    }

    pub fn instantiate(&self, sig: &Signature, tab: &SymbolTable) -> Result<Formula, SchemeError> {
        instantiate(sig, tab, self.scheme, &self.bindings)
    }
}

struct Get<'a> {
    b: &'a Bindings,
}

impl<'a> Get<'a> {
    fn any(&self, k: &str) -> Result<&'a Binding, SchemeError> {
        self.b.get(k).ok_or_else(|| SchemeError::MissingBinding(k.into()))
    }
    fn formula(&self, k: &str) -> Result<Formula, SchemeError> {
        match self.any(k)? {
            Binding::Formula(f) => Ok(f.clone()),
            _ => Err(SchemeError::WrongKind(k.into())),
        }
    }
    fn state(&self, k: &str) -> Result<StateSymbol, SchemeError> {
        match self.any(k)? {
            Binding::State(z) => Ok(z.clone()),
            _ => Err(SchemeError::WrongKind(k.into())),
        }
    }
    fn var(&self, k: &str, scheme: SchemeId) -> Result<StateSymbol, SchemeError> {
        let x = self.state(k)?;
        if !x.is_var() {
            return Err(SchemeError::SideCondition { scheme, detail: format!("'{}' must be a state variable", x.name) });
        }
        Ok(x)
    }
    fn sort(&self, k: &str) -> Result<Sort, SchemeError> {
        match self.any(k)? {
            Binding::Sort(s) => Ok(s.clone()),
            _ => Err(SchemeError::WrongKind(k.into())),
        }
    }
    fn op(&self) -> Result<Operator, SchemeError> {
        match self.any("op")? {
            Binding::Op(o) => Ok(o.clone()),
            _ => Err(SchemeError::WrongKind("op".into())),
        }
    }
    fn pos(&self, op: &Operator) -> Result<usize, SchemeError> {
        match self.any("pos")? {
            Binding::Pos(p) if *p >= 1 && *p <= op.arity() => Ok(*p - 1),
            Binding::Pos(p) => Err(SchemeError::Position { op: op.name.to_string(), pos: *p }),
            _ => Err(SchemeError::WrongKind("pos".into())),
        }
    }
    fn list(&self, k: &str, len: usize) -> Result<Vec<Formula>, SchemeError> {
        match self.any(k)? {
            Binding::List(fs) if fs.len() == len => Ok(fs.clone()),
            _ => Err(SchemeError::WrongKind(k.into())),
        }
    }
    fn context(&self, k: &str) -> Result<Context, SchemeError> {
        match self.any(k)? {
            Binding::Context(c) => Ok(c.clone()),
            _ => Err(SchemeError::WrongKind(k.into())),
        }
    }
}

/// `sides` with `f` inserted at 0-based position `i`.
pub fn splice(sides: &[Formula], i: usize, f: Formula) -> Vec<Formula> {
    let mut v = sides.to_vec();
    v.insert(i, f);
    v
}

fn same_sort(scheme: SchemeId, what: &str, a: &Sort, b: &Sort) -> Result<(), SchemeError> {
    if a != b {
        return Err(SchemeError::SideCondition { scheme, detail: format!("{what}: {a} vs {b}") });
    }
    Ok(())
}

/// The literal scheme instance. Bindings must cover exactly the scheme's
/// metavariables; the result is sort-checked.
pub fn instantiate(
    sig: &Signature,
    tab: &SymbolTable,
    scheme: SchemeId,
    b: &Bindings,
) -> Result<Formula, SchemeError> {
    for k in b.keys() {
        if !scheme.metavars().contains(&k.as_str()) {
            return Err(SchemeError::UnexpectedBinding(k.clone()));
        }
    }
    let g = Get { b };
    use Formula as F;
    let f = match scheme {
        SchemeId::TAUT => {
            let phi = g.formula("phi")?;
            sortcheck::sort_of(sig, tab, &phi)?;
            if !is_tautology(&phi)? {
                return Err(SchemeError::SideCondition { scheme, detail: "not a propositional tautology".into() });
            }
            phi
        }
        SchemeId::K_SIGMA_AX => {
            let op = g.op()?;
            let i = g.pos(&op)?;
            let sides = g.list("sides", op.arity() - 1)?;
            let (phi, chi) = (g.formula("phi")?, g.formula("chi")?);
            let bx = |f: Formula| F::boxed(&op, splice(&sides, i, f));
            F::implies(
                bx(F::implies(phi.clone(), chi.clone())),
                F::implies(bx(phi), bx(chi)),
            )
        }
        SchemeId::DUAL => {
            let op = g.op()?;
            let args = g.list("args", op.arity())?;
            let negs = args.iter().cloned().map(F::not).collect();
            F::iff(F::app(&op, args), F::not(F::boxed(&op, negs)))
        }
        SchemeId::K_AT => {
            let (z, s) = (g.state("z")?, g.sort("s")?);
            let (phi, psi) = (g.formula("phi")?, g.formula("psi")?);
            F::implies(
                F::at(z.clone(), s.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(F::at(z.clone(), s.clone(), phi), F::at(z, s, psi)),
            )
        }
        SchemeId::SELFDUAL => {
            let (z, s, phi) = (g.state("z")?, g.sort("s")?, g.formula("phi")?);
            F::iff(F::at(z.clone(), s.clone(), phi.clone()), F::not(F::at(z, s, F::not(phi))))
        }
        SchemeId::INTRO => {
            let (z, phi) = (g.state("z")?, g.formula("phi")?);
            let s = z.sort.clone();
            F::implies(F::state(&z), F::iff(phi.clone(), F::at(z, s, phi)))
        }
        SchemeId::AGREE => {
            let (y, z, t, phi) = (g.state("y")?, g.state("z")?, g.sort("t")?, g.formula("phi")?);
            let inner = y.sort.clone();
            F::iff(F::at(y, t.clone(), F::at(z.clone(), inner, phi.clone())), F::at(z, t, phi))
        }
        SchemeId::REF => {
            let (z, s) = (g.state("z")?, g.sort("s")?);
            F::at(z.clone(), s, F::state(&z))
        }
        SchemeId::BACK => {
            let op = g.op()?;
            let i = g.pos(&op)?;
            let sides = g.list("sides", op.arity() - 1)?;
            let (z, psi) = (g.state("z")?, g.formula("psi")?);
            let inner = F::at(z.clone(), op.args[i].clone(), psi.clone());
            F::implies(F::app(&op, splice(&sides, i, inner)), F::at(z, op.result.clone(), psi))
        }
        SchemeId::Q1 => {
            let x = g.var("x", scheme)?;
            let (phi, psi) = (g.formula("phi")?, g.formula("psi")?);
            if phi.has_free(&x) {
                return Err(SchemeError::SideCondition { scheme, detail: format!("'{}' is free in phi", x.name) });
            }
            F::implies(
                F::forall(x.clone(), F::implies(phi.clone(), psi.clone())),
                F::implies(phi, F::forall(x, psi)),
            )
        }
        SchemeId::Q2 => {
            let (x, y, phi) = (g.var("x", scheme)?, g.state("y")?, g.formula("phi")?);
            same_sort(scheme, "x and y", &x.sort, &y.sort)?;
            let sub = phi
                .substitute(&x, &y)
                .map_err(|e| SchemeError::SideCondition { scheme, detail: e.to_string() })?;
            F::implies(F::forall(x, phi), sub)
        }
        SchemeId::NAME => {
            let x = g.var("x", scheme)?;
            F::exists(x.clone(), F::state(&x))
        }
        SchemeId::BARCAN => {
            let x = g.var("x", scheme)?;
            let op = g.op()?;
            let i = g.pos(&op)?;
            let args = g.list("args", op.arity())?;
            // x must not occur free in the untouched arguments
            if let Some(j) = (0..args.len()).find(|j| *j != i && args[*j].has_free(&x)) {
                return Err(SchemeError::SideCondition {
                    scheme,
                    detail: format!("'{}' is free in argument {}", x.name, j + 1),
                });
            }
            let mut rhs = args.clone();
            rhs[i] = F::forall(x.clone(), rhs[i].clone());
            F::implies(F::forall(x, F::boxed(&op, args)), F::boxed(&op, rhs))
        }
        SchemeId::BARCAN_AT => {
            let (x, z, s, phi) = (g.var("x", scheme)?, g.state("z")?, g.sort("s")?, g.formula("phi")?);
            if x == z {
                return Err(SchemeError::SideCondition { scheme, detail: "x and z coincide".into() });
            }
            F::implies(
                F::forall(x.clone(), F::at(z.clone(), s.clone(), phi.clone())),
                F::at(z, s, F::forall(x, phi)),
            )
        }
        SchemeId::NOM => {
            let x = g.var("x", scheme)?;
            let (eta, theta, phi) = (g.context("eta")?, g.context("theta")?, g.formula("phi")?);
            sortcheck::context_sort(sig, &eta)?;
            sortcheck::context_sort(sig, &theta)?;
            same_sort(scheme, "eta and theta", eta.sort(), theta.sort())?;
            let xf = F::state(&x);
            let lhs = eta.apply(&F::and(xf.clone(), phi.clone()))?;
            let rhs = theta.apply_dual(&F::implies(xf, phi))?;
            F::forall(x, F::implies(lhs, rhs))
        }
        SchemeId::NOM_X => {
            let (x, y, z, s) = (g.var("x", scheme)?, g.state("y")?, g.state("z")?, g.sort("s")?);
            let xf = F::state(&x);
            F::implies(
                F::and(F::at(z.clone(), s.clone(), xf.clone()), F::at(y.clone(), s.clone(), xf)),
                F::at(z, s, F::state(&y)),
            )
        }
    };
    for k in scheme.metavars() {
        if !b.contains_key(*k) {
            return Err(SchemeError::MissingBinding(k.to_string()));
        }
    }
    sortcheck::sort_of(sig, tab, &f)?;
    Ok(f)
}
