//! Randomized soundness sweeps over axiom schemes and derived lemmas.
//!
//! Each trial draws a random model and a random well-sorted instance, then
//! searches assignments and worlds for a falsification. Trials are seeded
//! independently and run in parallel; the report is ordered by trial index.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::random::{random_assignment, random_model_with, Features, FormulaGen, SizeBounds, DENSITY};
use super::{Assignment, Model, World};
use crate::context::Context;
use crate::formula::Formula;
use crate::proof::library::{bridge_statement, nom_z_statement, sym_statement};
use crate::proof::scheme::{SchemeId, SchemeInstance};
use crate::proof::taut::is_tautology;
use crate::signature::{parse_sig, Operator, Signature, Sort, StateSymbol, SymbolKind, SymbolTable};

/// The fixed three-sort signature sweeps are drawn over.
pub const SWEEP_SIG: &str = "\
sort a
sort b
sort c
op f : a -> a
op g : a b -> a
op h : c a -> b
op u : c -> c
op k : -> c
prop p : a
prop p2 : a
prop q : b
prop r : c
nom i : a
nom i2 : a
nom j : b
nom l : c
svar x : a
svar y : a
svar v : b
svar w : c
";

pub fn sweep_signature() -> (Signature, SymbolTable) {
    parse_sig(SWEEP_SIG).expect("fixed signature")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepTarget {
    Scheme(SchemeId),
    NomZ,
    Sym,
    Bridge,
    /// `@_z φ → φ`: not valid, used as a negative control.
    BrokenAtElim,
}

impl SweepTarget {
    pub fn name(self) -> &'static str {
        match self {
            SweepTarget::Scheme(s) => s.name(),
            SweepTarget::NomZ => "NOM_Z",
            SweepTarget::Sym => "SYM",
            SweepTarget::Bridge => "BRIDGE",
            SweepTarget::BrokenAtElim => "BROKEN_AT_ELIM",
        }
    }

    pub fn parse(name: &str) -> Option<SweepTarget> {
        if let Some(s) = SchemeId::parse(name) {
            return Some(SweepTarget::Scheme(s));
        }
        [SweepTarget::NomZ, SweepTarget::Sym, SweepTarget::Bridge, SweepTarget::BrokenAtElim]
            .into_iter()
            .find(|t| t.name() == name)
    }

    fn tag(self) -> u64 {
        match self {
            SweepTarget::Scheme(s) => s as u64,
            SweepTarget::NomZ => 100,
            SweepTarget::Sym => 101,
            SweepTarget::Bridge => 102,
            SweepTarget::BrokenAtElim => 103,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub trials: usize,
    pub seed: u64,
    pub bounds: SizeBounds,
    /// Depth bound for the random formulas plugged into metavariables.
    pub depth: usize,
    /// Probability of each relation tuple and proposition membership.
    pub density: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig { trials: 1000, seed: 0, bounds: SizeBounds::uniform(4), depth: 3, density: DENSITY }
    }
}

#[derive(Debug, Clone)]
pub struct Counterexample {
    pub trial: usize,
    pub instance: Formula,
    pub model: Model,
    pub world: World,
    pub assignment: Assignment,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub target: SweepTarget,
    pub trials: usize,
    /// `(world, assignment)` pairs evaluated, summed over trials.
    pub evaluations: u64,
    pub counterexamples: Vec<Counterexample>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The seed of one trial; independent of execution order.
pub fn trial_seed(seed: u64, target: SweepTarget, trial: usize) -> u64 {
    splitmix(splitmix(seed ^ splitmix(target.tag())) ^ trial as u64)
}

/// Assignments enumerated exhaustively up to this count, sampled beyond it.
const EXHAUSTIVE: usize = 256;
const SAMPLED: usize = 64;

pub fn soundness_sweep(target: SweepTarget, cfg: &SweepConfig) -> SweepReport {
    let (sig, tab) = sweep_signature();
    let results: Vec<(u64, Option<Counterexample>)> = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(cfg.seed, target, trial));
            let model = random_model_with(&sig, &tab, &cfg.bounds, cfg.density, &mut rng);
            let instance = random_instance(target, &sig, &tab, cfg.depth, &mut rng);
            falsify(&model, &tab, &instance, &mut rng).map_or((0, None), |(n, hit)| {
                (n, hit.map(|(world, assignment)| Counterexample { trial, instance, model, world, assignment }))
            })
        })
        .collect();
    let evaluations = results.iter().map(|(n, _)| n).sum();
    let counterexamples = results.into_iter().filter_map(|(_, c)| c).collect();
    SweepReport { target, trials: cfg.trials, evaluations, counterexamples }
}

/// Searches for `(w, g)` with `f` false. Returns the number of pairs tried.
fn falsify(
    m: &Model,
    tab: &SymbolTable,
    f: &Formula,
    rng: &mut impl Rng,
) -> Option<(u64, Option<(World, Assignment)>)> {
    let vars: Vec<StateSymbol> = f.free_state_vars().into_iter().collect();
    let n = m.size(f.sort());
    let total: usize = vars.iter().map(|x| m.size(&x.sort)).product();
    let mut tried = 0u64;
    let mut hit = None;
    let mut try_g = |g: &Assignment, tried: &mut u64| -> bool {
        for w in 0..n {
            *tried += 1;
            if !m.satisfies(g, w, f).expect("well-sorted instance") {
                hit = Some((w, g.clone()));
                return false;
            }
        }
        true
    };
    if total <= EXHAUSTIVE {
        m.for_each_assignment(&vars, &mut |_, g| Ok(try_g(g, &mut tried))).ok()?;
    } else {
        for _ in 0..SAMPLED {
            let g = random_assignment(m, tab, rng).restrict(&vars);
            if !try_g(&g, &mut tried) {
                break;
            }
        }
    }
    Some((tried, hit))
}

struct Draw<'a, R> {
    sig: &'a Signature,
    tab: &'a SymbolTable,
    gen: FormulaGen<'a>,
    depth: usize,
    rng: &'a mut R,
}

impl<R: Rng> Draw<'_, R> {
    fn sort(&mut self) -> Sort {
        self.sig.sorts().choose(self.rng).expect("sorts").clone()
    }

    fn formula(&mut self, s: &Sort) -> Formula {
        self.gen.formula(s, self.depth, self.rng)
    }

    fn formula_without(&mut self, s: &Sort, x: &StateSymbol) -> Formula {
        for _ in 0..50 {
            let f = self.formula(s);
            if !f.has_free(x) {
                return f;
            }
        }
        Formula::top(s.clone())
    }

    fn state_symbols(&self, s: Option<&Sort>, vars_only: bool) -> Vec<StateSymbol> {
        self.tab
            .iter()
            .filter(|(_, _, so)| s.is_none_or(|s| s == *so))
            .filter_map(|(n, k, so)| match k {
                SymbolKind::Nominal if !vars_only => Some(StateSymbol::nominal(n, so.clone())),
                SymbolKind::StateVar => Some(StateSymbol::var(n, so.clone())),
                _ => None,
            })
            .collect()
    }

    fn state(&mut self, s: Option<&Sort>) -> StateSymbol {
        self.state_symbols(s, false).choose(self.rng).expect("every sort has a nominal").clone()
    }

    fn var(&mut self) -> StateSymbol {
        self.state_symbols(None, true).choose(self.rng).expect("state variables").clone()
    }

    fn op(&mut self, min_arity: usize) -> Operator {
        let ops: Vec<&Operator> = self.sig.ops().iter().filter(|o| o.arity() >= min_arity).collect();
        (*ops.choose(self.rng).expect("operators")).clone()
    }

    /// `(1-based pos, sides)` for a random position of `op`.
    fn sides(&mut self, op: &Operator) -> (usize, Vec<Formula>) {
        let i = self.rng.gen_range(0..op.arity());
        let sides = op.args.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, s)| s.clone()).collect::<Vec<_>>();
        (i + 1, sides.iter().map(|s| self.formula(s)).collect())
    }

    /// A nominal context of result sort `s` whose hole has sort `hole`.
    fn context_into(&mut self, s: &Sort, hole: &Sort) -> Option<Context> {
        for _ in 0..50 {
            let c = self.gen.nominal_context(s, self.depth, self.rng);
            if c.hole_sort() == Some(hole) {
                return Some(c);
            }
        }
        (s == hole).then(|| Context::Hole(s.clone()))
    }

    fn taut(&mut self) -> Formula {
        use Formula as F;
        let s = self.sort();
        let (a, b, c) = (self.formula(&s), self.formula(&s), self.formula(&s));
        let f = match self.rng.gen_range(0..8) {
            0 => F::or(a.clone(), F::not(a)),
            1 => F::implies(a.clone(), F::implies(b, a)),
            2 => F::implies(
                F::implies(a.clone(), F::implies(b.clone(), c.clone())),
                F::implies(F::implies(a.clone(), b), F::implies(a, c)),
            ),
            3 => F::implies(F::implies(F::not(a.clone()), F::not(b.clone())), F::implies(b, a)),
            4 => F::implies(F::and(a.clone(), b.clone()), F::and(b, a)),
            5 => F::iff(F::not(F::not(a.clone())), a),
            6 => F::implies(F::iff(a.clone(), b.clone()), F::implies(F::iff(b, c.clone()), F::iff(a, c))),
            _ => F::implies(F::or(a.clone(), b.clone()), F::or(b, a)),
        };
        debug_assert_eq!(is_tautology(&f), Ok(true));
        f
    }

    fn scheme(&mut self, id: SchemeId) -> Option<Formula> {
        let inst = SchemeInstance::new(id);
        let inst = match id {
            SchemeId::TAUT => inst.formula("phi", self.taut()),
            SchemeId::K_SIGMA_AX => {
                let op = self.op(1);
                let (pos, sides) = self.sides(&op);
                let s = op.args[pos - 1].clone();
                let (phi, chi) = (self.formula(&s), self.formula(&s));
                inst.op(&op).pos(pos).list("sides", sides).formula("phi", phi).formula("chi", chi)
            }
            SchemeId::DUAL => {
                let op = self.op(0);
                let args = op.args.iter().map(|s| self.formula(s)).collect();
                inst.op(&op).list("args", args)
            }
            SchemeId::K_AT | SchemeId::SELFDUAL => {
                let z = self.state(None);
                let s = self.sort();
                let phi = self.formula(&z.sort);
                let inst = inst.state("z", z.clone()).sort("s", s).formula("phi", phi);
                if id == SchemeId::K_AT {
                    let psi = self.formula(&z.sort);
                    inst.formula("psi", psi)
                } else {
                    inst
                }
            }
            SchemeId::INTRO => {
                let z = self.state(None);
                let phi = self.formula(&z.sort);
                inst.state("z", z).formula("phi", phi)
            }
            SchemeId::AGREE => {
                let (y, z, t) = (self.state(None), self.state(None), self.sort());
                let phi = self.formula(&z.sort);
                inst.state("y", y).state("z", z).sort("t", t).formula("phi", phi)
            }
            SchemeId::REF => {
                let (z, s) = (self.state(None), self.sort());
                inst.state("z", z).sort("s", s)
            }
            SchemeId::BACK => {
                let op = self.op(1);
                let (pos, sides) = self.sides(&op);
                let z = self.state(Some(&op.args[pos - 1]));
                let psi = self.formula(&z.sort);
                inst.op(&op).pos(pos).list("sides", sides).state("z", z).formula("psi", psi)
            }
            SchemeId::Q1 => {
                let x = self.var();
                let s = self.sort();
                let phi = self.formula_without(&s, &x);
                let psi = self.formula(&s);
                inst.state("x", x).formula("phi", phi).formula("psi", psi)
            }
            SchemeId::Q2 => {
                let x = self.var();
                let y = self.state(Some(&x.sort.clone()));
                let s = self.sort();
                let mut phi = self.formula(&s);
                for _ in 0..50 {
                    if phi.substitute(&x, &y).is_ok() {
                        break;
                    }
                    phi = self.formula(&s);
                }
                phi.substitute(&x, &y).ok()?;
                inst.state("x", x).state("y", y).formula("phi", phi)
            }
            SchemeId::NAME => inst.state("x", self.var()),
            SchemeId::BARCAN => {
                let x = self.var();
                let op = self.op(1);
                let i = self.rng.gen_range(0..op.arity());
                let args = op
                    .args
                    .iter()
                    .enumerate()
                    .map(|(j, s)| if j == i { self.formula(s) } else { self.formula_without(s, &x) })
                    .collect();
                inst.state("x", x).op(&op).pos(i + 1).list("args", args)
            }
            SchemeId::BARCAN_AT => {
                let x = self.var();
                let z = loop {
                    let z = self.state(None);
                    if z != x {
                        break z;
                    }
                };
                let s = self.sort();
                let phi = self.formula(&z.sort);
                inst.state("x", x).state("z", z).sort("s", s).formula("phi", phi)
            }
            SchemeId::NOM => {
                let x = self.var();
                let s = self.sort();
                let eta = self.context_into(&s, &x.sort)?;
                let theta = self.context_into(&s, &x.sort)?;
                let phi = self.formula(&x.sort);
                inst.state("x", x).context("eta", eta).context("theta", theta).formula("phi", phi)
            }
            SchemeId::NOM_X => {
                let x = self.var();
                let y = self.state(Some(&x.sort.clone()));
                let z = self.state(Some(&x.sort.clone()));
                let s = self.sort();
                inst.state("x", x).state("y", y).state("z", z).sort("s", s)
            }
        };
        Some(inst.instantiate(self.sig, self.tab).unwrap_or_else(|e| panic!("sweep drew a bad {id} instance: {e}")))
    }

    fn draw(&mut self, target: SweepTarget) -> Option<Formula> {
        match target {
            SweepTarget::Scheme(id) => self.scheme(id),
            SweepTarget::NomZ => {
                let z = self.state(None);
                let y = self.state(Some(&z.sort.clone()));
                let s = self.sort();
                let phi = self.formula(&z.sort);
                Some(nom_z_statement(&z, &y, &s, &phi))
            }
            SweepTarget::Sym => {
                let z = self.state(None);
                let y = self.state(Some(&z.sort.clone()));
                let s = self.sort();
                Some(sym_statement(&z, &y, &s))
            }
            SweepTarget::Bridge => {
                let op = self.op(1);
                let (pos, sides) = self.sides(&op);
                let z = self.state(Some(&op.args[pos - 1]));
                let phi = self.formula(&z.sort);
                Some(bridge_statement(&op, pos, &sides, &z, &phi))
            }
            SweepTarget::BrokenAtElim => {
                let z = self.state(None);
                let phi = self.formula(&z.sort);
                Some(Formula::implies(Formula::at(z.clone(), z.sort.clone(), phi.clone()), phi))
            }
        }
    }
}

/// A random instance of `target` over `sig`. Retries draws whose side
/// conditions cannot be met.
pub fn random_instance(
    target: SweepTarget,
    sig: &Signature,
    tab: &SymbolTable,
    depth: usize,
    rng: &mut impl Rng,
) -> Formula {
    let mut d = Draw { sig, tab, gen: FormulaGen::new(sig, tab, Features::FULL), depth, rng };
    loop {
        if let Some(f) = d.draw(target) {
            return f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sortcheck::well_sorted;

    #[test]
    fn instances_are_well_sorted() {
        let (sig, tab) = sweep_signature();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut targets: Vec<SweepTarget> = SchemeId::ALL.iter().map(|s| SweepTarget::Scheme(*s)).collect();
        targets.extend([SweepTarget::NomZ, SweepTarget::Sym, SweepTarget::Bridge, SweepTarget::BrokenAtElim]);
        for t in targets {
            for _ in 0..30 {
                let f = random_instance(t, &sig, &tab, 3, &mut rng);
                well_sorted(&sig, &tab, &f, f.sort()).unwrap();
            }
        }
    }

    #[test]
    fn report_is_deterministic() {
        let cfg = SweepConfig { trials: 40, seed: 11, ..SweepConfig::default() };
        let a = soundness_sweep(SweepTarget::BrokenAtElim, &cfg);
        let b = soundness_sweep(SweepTarget::BrokenAtElim, &cfg);
        let trials = |r: &SweepReport| r.counterexamples.iter().map(|c| (c.trial, c.world)).collect::<Vec<_>>();
        assert_eq!(trials(&a), trials(&b));
        assert_eq!(a.evaluations, b.evaluations);
        assert!(!a.counterexamples.is_empty());
    }

    #[test]
    fn small_sweeps_find_nothing_for_sound_schemes() {
        let cfg = SweepConfig { trials: 50, ..SweepConfig::default() };
        for id in SchemeId::ALL {
            let r = soundness_sweep(SweepTarget::Scheme(id), &cfg);
            assert!(r.counterexamples.is_empty(), "{id}: {}", r.counterexamples[0].instance);
        }
    }
}
