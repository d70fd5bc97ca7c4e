//! Finite sorted Kripke models, assignments and the satisfaction relation.

mod mdl;
pub mod random;
mod submodel;
pub mod sweep;

use std::collections::BTreeMap;
use std::sync::Arc;

use crate::formula::Formula;
use crate::signature::{Ident, Signature, Sort, StateKind, StateSymbol, SymbolKind, SymbolTable};

pub use mdl::{parse_mdl, write_mdl, MdlError};
pub use submodel::{generated_submodel, Submodel};

/// A world is an index into the world list of its sort.
pub type World = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("state variable '{0}' is not assigned")]
    UnboundStateVariable(String),
    #[error("world {world} does not exist in sort {sort}")]
    SortMismatch { sort: Sort, world: World },
    #[error("sort {0} has no worlds in this model")]
    UnknownSort(Sort),
    #[error("nominal '{0}' has no denotation")]
    UnvaluedNominal(String),
    #[error("operator '{0}' has no relation in this model")]
    UnknownOperator(String),
    #[error("enumeration needs {needed} cases, above the limit of {limit}")]
    ResourceLimit { needed: u128, limit: u128 },
}

/// `R_σ ⊆ W_s × W_s1 × … × W_sn`, stored by source world.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    /// Result sort first, then argument sorts.
    pub sorts: Vec<Sort>,
    succ: Vec<Vec<Vec<World>>>,
}

impl Relation {
    fn new(result: Sort, args: Vec<Sort>) -> Self {
        let mut sorts = vec![result];
        sorts.extend(args);
        Relation { sorts, succ: Vec::new() }
    }

    pub fn arity(&self) -> usize {
        self.sorts.len() - 1
    }

    /// Argument tuples related to `w`, sorted.
    pub fn from(&self, w: World) -> &[Vec<World>] {
        self.succ.get(w).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn contains(&self, w: World, args: &[World]) -> bool {
        self.from(w).binary_search_by(|t| t.as_slice().cmp(args)).is_ok()
    }

    fn insert(&mut self, w: World, args: Vec<World>) {
        if self.succ.len() <= w {
            self.succ.resize(w + 1, Vec::new());
        }
        let row = &mut self.succ[w];
        if let Err(i) = row.binary_search(&args) {
            row.insert(i, args);
        }
    }

    /// All tuples `(w, w1, …, wn)` in lexicographic order.
    pub fn tuples(&self) -> impl Iterator<Item = (World, &[World])> + '_ {
        self.succ.iter().enumerate().flat_map(|(w, row)| row.iter().map(move |t| (w, t.as_slice())))
    }

    pub fn len(&self) -> usize {
        self.succ.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// `g : SVAR → W`, sorted.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<Ident, (Sort, World)>,
}

impl Assignment {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, x: &StateSymbol, w: World) {
        self.map.insert(x.name.clone(), (x.sort.clone(), w));
    }

    pub fn get(&self, name: &str) -> Option<World> {
        self.map.get(name).map(|(_, w)| *w)
    }

    pub fn remove(&mut self, name: &str) -> Option<(Sort, World)> {
        self.map.remove(name)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, &Sort, World)> {
        self.map.iter().map(|(n, (s, w))| (n, s, *w))
    }

    /// Keeps only the given variables.
    pub fn restrict<'a>(&self, vars: impl IntoIterator<Item = &'a StateSymbol>) -> Assignment {
        let mut out = Assignment::new();
        for x in vars {
            if let Some(w) = self.get(&x.name) {
                out.set(x, w);
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Model {
    worlds: BTreeMap<Sort, Vec<Ident>>,
    rels: BTreeMap<Ident, Relation>,
    props: BTreeMap<Ident, (Sort, Vec<bool>)>,
    noms: BTreeMap<Ident, (Sort, World)>,
}

impl Model {
    /// A model with no worlds and an empty relation for every operator.
    pub fn empty(sig: &Signature) -> Self {
        let worlds = sig.sorts().iter().map(|s| (s.clone(), Vec::new())).collect();
        let rels = sig
            .ops()
            .iter()
            .map(|op| (op.name.clone(), Relation::new(op.result.clone(), op.args.clone())))
            .collect();
        Model { worlds, rels, props: BTreeMap::new(), noms: BTreeMap::new() }
    }

    /// Worlds named `<sort>0`, `<sort>1`, … with the given counts.
    pub fn with_sizes(sig: &Signature, size: impl Fn(&Sort) -> usize) -> Self {
        let mut m = Model::empty(sig);
        for s in sig.sorts() {
            for i in 0..size(s) {
                m.add_world(s, &format!("{}{}", s.name().to_lowercase(), i));
            }
        }
        m
    }

    pub fn add_world(&mut self, sort: &Sort, id: &str) -> World {
        let ws = self.worlds.entry(sort.clone()).or_default();
        ws.push(Arc::from(id));
        ws.len() - 1
    }

    pub fn sorts(&self) -> impl Iterator<Item = &Sort> {
        self.worlds.keys()
    }

    pub fn size(&self, sort: &Sort) -> usize {
        self.worlds.get(sort).map_or(0, Vec::len)
    }

    pub fn world_ids(&self, sort: &Sort) -> &[Ident] {
        self.worlds.get(sort).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn world_id(&self, sort: &Sort, w: World) -> Option<&str> {
        self.world_ids(sort).get(w).map(|s| &**s)
    }

    pub fn find_world(&self, sort: &Sort, id: &str) -> Option<World> {
        self.world_ids(sort).iter().position(|x| &**x == id)
    }

    pub fn relation(&self, op: &str) -> Option<&Relation> {
        self.rels.get(op)
    }

    pub fn relations(&self) -> impl Iterator<Item = (&Ident, &Relation)> {
        self.rels.iter()
    }

    pub fn add_tuple(&mut self, op: &str, w: World, args: Vec<World>) -> Result<(), EvalError> {
        let r = self.rels.get_mut(op).ok_or_else(|| EvalError::UnknownOperator(op.to_string()))?;
        assert_eq!(r.arity(), args.len(), "tuple arity for '{op}'");
        r.insert(w, args);
        Ok(())
    }

    pub fn set_prop(&mut self, name: &str, sort: &Sort, w: World, value: bool) {
        let n = self.size(sort);
        let (_, bits) = self.props.entry(Arc::from(name)).or_insert_with(|| (sort.clone(), vec![false; n]));
        if bits.len() < n {
            bits.resize(n, false);
        }
        bits[w] = value;
    }

    pub fn prop_holds(&self, name: &str, w: World) -> bool {
        self.props.get(name).and_then(|(_, b)| b.get(w).copied()).unwrap_or(false)
    }

    /// `V_s(p)` as a sorted list.
    pub fn prop_extension(&self, name: &str) -> Vec<World> {
        match self.props.get(name) {
            Some((_, b)) => b.iter().enumerate().filter(|(_, v)| **v).map(|(i, _)| i).collect(),
            None => Vec::new(),
        }
    }

    pub fn props(&self) -> impl Iterator<Item = (&Ident, &Sort)> {
        self.props.iter().map(|(n, (s, _))| (n, s))
    }

    pub fn set_nom(&mut self, name: &str, sort: &Sort, w: World) {
        self.noms.insert(Arc::from(name), (sort.clone(), w));
    }

    pub fn nom(&self, name: &str) -> Option<World> {
        self.noms.get(name).map(|(_, w)| *w)
    }

    pub fn noms(&self) -> impl Iterator<Item = (&Ident, &Sort, World)> {
        self.noms.iter().map(|(n, (s, w))| (n, s, *w))
    }

    /// Checks `W_s ≠ ∅` for every sort of `sig` and that every nominal of
    /// `tab` denotes exactly one world.
    pub fn validate(&self, sig: &Signature, tab: &SymbolTable) -> Result<(), EvalError> {
        for s in sig.sorts() {
            if self.size(s) == 0 {
                return Err(EvalError::UnknownSort(s.clone()));
            }
        }
        for (name, kind, sort) in tab.iter() {
            if kind == SymbolKind::Nominal {
                match self.nom(name) {
                    Some(w) if w < self.size(sort) => {}
                    Some(w) => return Err(EvalError::SortMismatch { sort: sort.clone(), world: w }),
                    None => return Err(EvalError::UnvaluedNominal(name.to_string())),
                }
            }
        }
        Ok(())
    }

    fn den(&self, g: &Assignment, z: &StateSymbol) -> Result<World, EvalError> {
        match z.kind {
            StateKind::Nominal => self.nom(&z.name).ok_or_else(|| EvalError::UnvaluedNominal(z.name.to_string())),
            StateKind::Var => g.get(&z.name).ok_or_else(|| EvalError::UnboundStateVariable(z.name.to_string())),
        }
    }

    /// `M, g, w ⊨_s φ` where `s` is the sort of `φ`.
    pub fn satisfies(&self, g: &Assignment, w: World, f: &Formula) -> Result<bool, EvalError> {
        self.check_world(f.sort(), w)?;
        let mut g = g.clone();
        self.eval(&mut g, w, f)
    }

    fn check_world(&self, sort: &Sort, w: World) -> Result<(), EvalError> {
        let n = self.size(sort);
        if n == 0 {
            return Err(EvalError::UnknownSort(sort.clone()));
        }
        if w >= n {
            return Err(EvalError::SortMismatch { sort: sort.clone(), world: w });
        }
        Ok(())
    }

    fn eval(&self, g: &mut Assignment, w: World, f: &Formula) -> Result<bool, EvalError> {
        Ok(match f {
            Formula::Top(_) => true,
            Formula::Prop { name, .. } => self.prop_holds(name, w),
            Formula::Nom { name, .. } => {
                self.nom(name).ok_or_else(|| EvalError::UnvaluedNominal(name.to_string()))? == w
            }
            Formula::SVar { name, .. } => {
                g.get(name).ok_or_else(|| EvalError::UnboundStateVariable(name.to_string()))? == w
            }
            Formula::Not(a) => !self.eval(g, w, a)?,
            Formula::Or(a, b) => self.eval(g, w, a)? || self.eval(g, w, b)?,
            Formula::App { op, args, .. } => {
                let r = self.rels.get(op).ok_or_else(|| EvalError::UnknownOperator(op.to_string()))?;
                for t in r.from(w) {
                    let mut all = true;
                    for (a, wi) in args.iter().zip(t) {
                        if !self.eval(g, *wi, a)? {
                            all = false;
                            break;
                        }
                    }
                    if all {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::At { sym, body, .. } => {
                let v = self.den(g, sym)?;
                self.check_world(&sym.sort, v)?;
                self.eval(g, v, body)?
            }
            Formula::Forall { var, body } => {
                let n = self.size(&var.sort);
                if n == 0 {
                    return Err(EvalError::UnknownSort(var.sort.clone()));
                }
                let saved = g.remove(&var.name);
                let mut result = true;
                for v in 0..n {
                    g.set(var, v);
                    match self.eval(g, w, body) {
                        Ok(true) => {}
                        Ok(false) => {
                            result = false;
                            break;
                        }
                        Err(e) => {
                            restore(g, &var.name, saved);
                            return Err(e);
                        }
                    }
                }
                restore(g, &var.name, saved);
                result
            }
        })
    }

    /// Truth at every world of the formula's sort under every assignment of
    /// its free state variables.
    pub fn valid(&self, f: &Formula) -> Result<bool, EvalError> {
        let vars: Vec<StateSymbol> = f.free_state_vars().into_iter().collect();
        let sort = f.sort();
        let n = self.size(sort);
        if n == 0 {
            return Err(EvalError::UnknownSort(sort.clone()));
        }
        let mut ok = true;
        self.for_each_assignment(&vars, &mut |m, g| {
            for w in 0..n {
                let mut g = g.clone();
                if !m.eval(&mut g, w, f)? {
                    ok = false;
                    return Ok(false);
                }
            }
            Ok(true)
        })?;
        Ok(ok)
    }

    /// Calls `k` on every assignment of `vars`; stops when `k` returns false.
    pub fn for_each_assignment(
        &self,
        vars: &[StateSymbol],
        k: &mut dyn FnMut(&Model, &Assignment) -> Result<bool, EvalError>,
    ) -> Result<(), EvalError> {
        let sizes: Vec<usize> = vars.iter().map(|x| self.size(&x.sort)).collect();
        if let Some(i) = sizes.iter().position(|n| *n == 0) {
            return Err(EvalError::UnknownSort(vars[i].sort.clone()));
        }
        let mut idx = vec![0usize; vars.len()];
        loop {
            let mut g = Assignment::new();
            for (x, w) in vars.iter().zip(&idx) {
                g.set(x, *w);
            }
            if !k(self, &g)? {
                return Ok(());
            }
            if !advance(&mut idx, &sizes) {
                return Ok(());
            }
        }
    }

    /// Validity on the underlying frame: every valuation of the propositions
    /// and nominals occurring in `f`, every assignment, every world.
    pub fn frame_valid(&self, f: &Formula, limit: u128) -> Result<bool, EvalError> {
        let props: Vec<(Ident, Sort)> = f.props().into_iter().collect();
        let noms: Vec<StateSymbol> =
            f.state_symbols().into_iter().filter(|z| z.kind == StateKind::Nominal).collect();
        let vars = f.free_state_vars();
        // one radix-2 slot per (prop, world), one slot per nominal
        let mut radix = Vec::new();
        for (_, s) in &props {
            radix.extend(std::iter::repeat(2).take(self.size(s)));
        }
        for z in &noms {
            radix.push(self.size(&z.sort));
        }
        let mut needed: u128 = 1;
        for r in radix.iter().copied().chain(vars.iter().map(|x| self.size(&x.sort))) {
            needed = needed.saturating_mul(r as u128);
        }
        needed = needed.saturating_mul(self.size(f.sort()) as u128);
        if needed > limit {
            return Err(EvalError::ResourceLimit { needed, limit });
        }
        if radix.iter().any(|r| *r == 0) {
            return Err(EvalError::UnknownSort(f.sort().clone()));
        }
        let mut m = self.clone();
        let mut idx = vec![0usize; radix.len()];
        loop {
            let mut k = 0;
            for (p, s) in &props {
                for w in 0..self.size(s) {
                    m.set_prop(p, s, w, idx[k] == 1);
                    k += 1;
                }
            }
            for z in &noms {
                m.set_nom(&z.name, &z.sort, idx[k]);
                k += 1;
            }
            if !m.valid(f)? {
                return Ok(false);
            }
            if !advance(&mut idx, &radix) {
                return Ok(true);
            }
        }
    }
}

fn restore(g: &mut Assignment, name: &Ident, saved: Option<(Sort, World)>) {
    g.remove(name);
    if let Some((s, w)) = saved {
        g.map.insert(name.clone(), (s, w));
    }
}

/// Mixed-radix increment; false after the last combination.
pub(crate) fn advance(idx: &mut [usize], radix: &[usize]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < radix[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}
