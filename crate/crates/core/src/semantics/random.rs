//! Seeded generators for models, assignments, formulas and contexts.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{advance, Assignment, Model};
use crate::context::Context;
use crate::formula::Formula;
use crate::signature::{Signature, Sort, StateKind, StateSymbol, SymbolKind, SymbolTable};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Upper bound on the number of worlds per sort (at least 1).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SizeBounds {
    pub default: usize,
    pub per_sort: BTreeMap<Sort, usize>,
}

impl SizeBounds {
    pub fn uniform(n: usize) -> Self {
        SizeBounds { default: n.max(1), per_sort: BTreeMap::new() }
    }

    pub fn get(&self, s: &Sort) -> usize {
        self.per_sort.get(s).copied().unwrap_or(self.default).max(1)
    }
}

impl Default for SizeBounds {
    fn default() -> Self {
        SizeBounds::uniform(3)
    }
}

pub const DENSITY: f64 = 0.5;

/// Deterministic in `seed`: sizes uniform in `1..=bound`, every tuple and
/// every proposition membership with probability 1/2, nominals uniform.
pub fn random_model(sig: &Signature, tab: &SymbolTable, bounds: &SizeBounds, seed: u64) -> Model {
    random_model_with(sig, tab, bounds, DENSITY, &mut rng(seed))
}

pub fn random_model_with(
    sig: &Signature,
    tab: &SymbolTable,
    bounds: &SizeBounds,
    density: f64,
    rng: &mut impl Rng,
) -> Model {
    let sizes: BTreeMap<Sort, usize> =
        sig.sorts().iter().map(|s| (s.clone(), rng.gen_range(1..=bounds.get(s)))).collect();
    let mut m = Model::with_sizes(sig, |s| sizes[s]);
    for op in sig.ops() {
        let mut radix = vec![sizes[&op.result]];
        radix.extend(op.args.iter().map(|s| sizes[s]));
        let mut idx = vec![0; radix.len()];
        loop {
            if rng.gen_bool(density) {
                m.add_tuple(&op.name, idx[0], idx[1..].to_vec()).expect("operator from signature");
            }
            if !advance(&mut idx, &radix) {
                break;
            }
        }
    }
    for (name, kind, sort) in tab.iter() {
        match kind {
            SymbolKind::Prop => {
                for w in 0..sizes[sort] {
                    let v = rng.gen_bool(density);
                    m.set_prop(name, sort, w, v);
                }
            }
            SymbolKind::Nominal => {
                let w = rng.gen_range(0..sizes[sort]);
                m.set_nom(name, sort, w);
            }
            SymbolKind::StateVar => {}
        }
    }
    m
}

/// Every state variable of `tab` gets a uniform world of its sort.
pub fn random_assignment(m: &Model, tab: &SymbolTable, rng: &mut impl Rng) -> Assignment {
    let mut g = Assignment::new();
    for (name, kind, sort) in tab.iter() {
        if kind == SymbolKind::StateVar {
            g.set(&StateSymbol::var(name, sort.clone()), rng.gen_range(0..m.size(sort)));
        }
    }
    g
}

/// Which hybrid constructs the formula generator may produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Features {
    pub nominals: bool,
    pub svars: bool,
    pub at: bool,
    pub forall: bool,
}

impl Features {
    pub const BASIC: Features = Features { nominals: false, svars: false, at: false, forall: false };
    pub const AT: Features = Features { nominals: true, svars: true, at: true, forall: false };
    pub const FORALL: Features = Features { nominals: true, svars: true, at: false, forall: true };
    pub const FULL: Features = Features { nominals: true, svars: true, at: true, forall: true };
}

pub struct FormulaGen<'a> {
    pub sig: &'a Signature,
    pub tab: &'a SymbolTable,
    pub features: Features,
}

#[derive(Clone, Copy)]
enum Node {
    Not,
    Or,
    App,
    At,
    Forall,
}

impl<'a> FormulaGen<'a> {
    pub fn new(sig: &'a Signature, tab: &'a SymbolTable, features: Features) -> Self {
        FormulaGen { sig, tab, features }
    }

    fn state_symbols(&self) -> Vec<StateSymbol> {
        self.tab
            .iter()
            .filter_map(|(n, k, s)| match k {
                SymbolKind::Nominal if self.features.nominals => Some(StateSymbol::nominal(n, s.clone())),
                SymbolKind::StateVar if self.features.svars => Some(StateSymbol::var(n, s.clone())),
                _ => None,
            })
            .collect()
    }

    pub fn leaf(&self, sort: &Sort, rng: &mut impl Rng) -> Formula {
        let mut leaves = vec![Formula::top(sort.clone())];
        for p in self.tab.of(SymbolKind::Prop, sort) {
            leaves.push(Formula::prop(&p, sort.clone()));
        }
        if self.features.nominals {
            for j in self.tab.of(SymbolKind::Nominal, sort) {
                leaves.push(Formula::nom(&j, sort.clone()));
            }
        }
        if self.features.svars {
            for x in self.tab.of(SymbolKind::StateVar, sort) {
                leaves.push(Formula::svar(&x, sort.clone()));
            }
        }
        for op in self.sig.ops_with_result(sort).filter(|o| o.arity() == 0) {
            leaves.push(Formula::app(op, vec![]));
        }
        leaves.swap_remove(rng.gen_range(0..leaves.len()))
    }

    /// A well-sorted formula of the given sort with depth at most `depth`.
    pub fn formula(&self, sort: &Sort, depth: usize, rng: &mut impl Rng) -> Formula {
        if depth == 0 || rng.gen_bool(0.25) {
            return self.leaf(sort, rng);
        }
        let ops: Vec<_> = self.sig.ops_with_result(sort).filter(|o| o.arity() > 0).collect();
        let syms = self.state_symbols();
        let svars: Vec<StateSymbol> = syms.iter().filter(|z| z.kind == StateKind::Var).cloned().collect();
        let mut kinds = vec![Node::Not, Node::Or];
        if !ops.is_empty() {
            kinds.extend([Node::App, Node::App]);
        }
        if self.features.at && !syms.is_empty() {
            kinds.push(Node::At);
        }
        if self.features.forall && !svars.is_empty() {
            kinds.push(Node::Forall);
        }
        let d = depth - 1;
        match *kinds.choose(rng).expect("nonempty") {
            Node::Not => Formula::not(self.formula(sort, d, rng)),
            Node::Or => Formula::or(self.formula(sort, d, rng), self.formula(sort, d, rng)),
            Node::App => {
                let op = *ops.choose(rng).expect("nonempty");
                let args = op.args.iter().map(|s| self.formula(s, d, rng)).collect();
                Formula::app(op, args)
            }
            Node::At => {
                let z = syms.choose(rng).expect("nonempty").clone();
                let body = self.formula(&z.sort, d, rng);
                Formula::at(z, sort.clone(), body)
            }
            Node::Forall => {
                let x = svars.choose(rng).expect("nonempty").clone();
                Formula::forall(x, self.formula(sort, d, rng))
            }
        }
    }

    /// A context in `NomC_sort` of depth at most `depth`.
    pub fn nominal_context(&self, sort: &Sort, depth: usize, rng: &mut impl Rng) -> Context {
        let ops: Vec<_> = self.sig.ops_with_result(sort).filter(|o| o.arity() > 0).collect();
        if depth == 0 || ops.is_empty() || rng.gen_bool(0.2) {
            return Context::Hole(sort.clone());
        }
        let op = *ops.choose(rng).expect("nonempty");
        let hole = rng.gen_range(0..op.arity());
        let args = op
            .args
            .iter()
            .enumerate()
            .map(|(i, s)| {
                if i == hole {
                    self.nominal_context(s, depth - 1, rng)
                } else {
                    self.filler(s, depth - 1, rng)
                }
            })
            .collect();
        Context::op(op, args)
    }

    /// A hole-free context.
    fn filler(&self, sort: &Sort, depth: usize, rng: &mut impl Rng) -> Context {
        let ops: Vec<_> = self.sig.ops_with_result(sort).collect();
        if depth == 0 || ops.is_empty() || rng.gen_bool(0.7) {
            return Context::Top(sort.clone());
        }
        let op = *ops.choose(rng).expect("nonempty");
        Context::op(op, op.args.iter().map(|s| self.filler(s, depth - 1, rng)).collect())
    }
}
