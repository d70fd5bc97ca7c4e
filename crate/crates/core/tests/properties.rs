//! Property tests for the module invariants. Random structures are drawn from
//! a proptest-chosen seed so shrinking reports the seed of a failing case.

use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use hml::formula::Formula;
use hml::proof::library::{lemma_signature, library};
use hml::proof::{check_proof, Justification, ProofLine, SchemeId, SystemId};
use hml::semantics::random::{random_assignment, random_model_with, rng, Features, FormulaGen, SizeBounds, DENSITY};
use hml::semantics::sweep::{random_instance, sweep_signature, SweepTarget};
use hml::semantics::{generated_submodel, parse_mdl, Assignment, Model, World};
use hml::signature::{parse_sig, Signature, Sort, StateSymbol, SymbolKind, SymbolTable};
use hml::sortcheck::sort_of;
use hml::syntax::{parse_formula, print_formula};
use hml::translation::{correspondence_sides, translate_at, FOFormula, FOTerm};

/// Truth straight from the satisfaction clauses, with `σ^□` evaluated by its
/// own universal clause rather than through negation.
mod oracle {
    use super::*;

    pub fn holds(m: &Model, g: &Assignment, w: World, f: &Formula) -> bool {
        match f {
            Formula::Top(_) => true,
            Formula::Prop { name, .. } => m.prop_holds(name, w),
            Formula::Nom { name, .. } => m.nom(name) == Some(w),
            Formula::SVar { name, .. } => g.get(name) == Some(w),
            Formula::Not(a) => !holds(m, g, w, a),
            Formula::Or(a, b) => holds(m, g, w, a) || holds(m, g, w, b),
            Formula::App { op, args, .. } => m
                .relation(op)
                .unwrap()
                .from(w)
                .iter()
                .any(|t| args.iter().zip(t).all(|(a, u)| holds(m, g, *u, a))),
            Formula::At { sym, body, .. } => {
                let u = if sym.is_var() { g.get(&sym.name) } else { m.nom(&sym.name) };
                holds(m, g, u.unwrap(), body)
            }
            Formula::Forall { var, body } => (0..m.size(&var.sort)).all(|u| {
                let mut h = g.clone();
                h.set(var, u);
                holds(m, &h, w, body)
            }),
        }
    }

    /// `σ^□(φ1, …, φn)` at `w`: every related tuple has some `φi` true.
    pub fn box_holds(m: &Model, g: &Assignment, w: World, op: &str, args: &[Formula]) -> bool {
        m.relation(op).unwrap().from(w).iter().all(|t| args.iter().zip(t).any(|(a, u)| holds(m, g, *u, a)))
    }
}

struct World3 {
    sig: Signature,
    tab: SymbolTable,
}

impl World3 {
    fn sweep() -> Self {
        let (sig, tab) = sweep_signature();
        World3 { sig, tab }
    }

    fn gen(&self) -> FormulaGen<'_> {
        FormulaGen::new(&self.sig, &self.tab, Features::FULL)
    }

    fn model(&self, r: &mut ChaCha8Rng) -> Model {
        random_model_with(&self.sig, &self.tab, &SizeBounds::uniform(4), DENSITY, r)
    }

    fn sort(&self, r: &mut ChaCha8Rng) -> Sort {
        self.sig.sorts().choose(r).unwrap().clone()
    }
}

fn svars(tab: &SymbolTable) -> Vec<StateSymbol> {
    tab.iter().filter(|(_, k, _)| *k == SymbolKind::StateVar).map(|(n, _, s)| StateSymbol::var(n, s.clone())).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn parse_print_round_trip(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let f = w.gen().formula(&w.sort(&mut r), 6, &mut r);
        let text = print_formula(&f);
        prop_assert_eq!(parse_formula(&w.sig, &w.tab, &text).unwrap(), f);
    }

    #[test]
    fn substitution_invariants(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let f = w.gen().formula(&w.sort(&mut r), 5, &mut r);
        let vars = svars(&w.tab);
        let x = vars.choose(&mut r).unwrap().clone();
        prop_assert_eq!(f.substitute(&x, &x).unwrap(), f.clone());
        let same_sort: Vec<StateSymbol> = w.tab.iter()
            .filter(|(_, k, s)| *k != SymbolKind::Prop && **s == x.sort)
            .map(|(n, k, s)| if k == SymbolKind::StateVar { StateSymbol::var(n, s.clone()) } else { StateSymbol::nominal(n, s.clone()) })
            .collect();
        let y = same_sort.choose(&mut r).unwrap().clone();
        if let Ok(g) = f.substitute(&x, &y) {
            prop_assert!(sort_of(&w.sig, &w.tab, &g).is_ok());
            let mut bound = f.free_state_vars();
            bound.remove(&x);
            if y.is_var() {
                bound.insert(y.clone());
            }
            prop_assert!(g.free_state_vars().is_subset(&bound));
        }
    }

    #[test]
    fn contexts_stay_well_sorted(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let eta = w.gen().nominal_context(&w.sort(&mut r), 4, &mut r);
        prop_assert_eq!(eta.hole_count(), 1);
        prop_assert!(eta.is_nominal());
        let phi = w.gen().formula(eta.hole_sort().unwrap(), 3, &mut r);
        for f in [eta.apply(&phi).unwrap(), eta.apply_dual(&phi).unwrap()] {
            prop_assert_eq!(&sort_of(&w.sig, &w.tab, &f).unwrap(), eta.sort());
        }
    }

    #[test]
    fn satisfies_agrees_with_the_oracle(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let s = w.sort(&mut r);
        let f = w.gen().formula(&s, 4, &mut r);
        for u in 0..m.size(&s) {
            prop_assert_eq!(m.satisfies(&g, u, &f).unwrap(), oracle::holds(&m, &g, u, &f), "{}", print_formula(&f));
        }
    }

    #[test]
    fn dual_clause(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let ops: Vec<_> = w.sig.ops().iter().filter(|o| (1..=2).contains(&o.arity())).collect();
        let op = *ops.choose(&mut r).unwrap();
        let args: Vec<Formula> = op.args.iter().map(|s| w.gen().formula(s, 3, &mut r)).collect();
        let boxed = Formula::boxed(op, args.clone());
        let negated = Formula::not(Formula::app(op, args.iter().cloned().map(Formula::not).collect()));
        prop_assert_eq!(&boxed, &negated);
        for u in 0..m.size(&op.result) {
            prop_assert_eq!(m.satisfies(&g, u, &boxed).unwrap(), oracle::box_holds(&m, &g, u, &op.name, &args));
        }
    }

    #[test]
    fn only_free_variables_matter(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let s = w.sort(&mut r);
        let f = w.gen().formula(&s, 4, &mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let mut h = random_assignment(&m, &w.tab, &mut r);
        for x in f.free_state_vars() {
            h.set(&x, g.get(&x.name).unwrap());
        }
        for u in 0..m.size(&s) {
            prop_assert_eq!(m.satisfies(&g, u, &f).unwrap(), m.satisfies(&h, u, &f).unwrap());
        }
    }

    #[test]
    fn at_ignores_the_current_world(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let syms: Vec<StateSymbol> = w.tab.iter()
            .filter(|(_, k, _)| *k != SymbolKind::Prop)
            .map(|(n, _, _)| w.tab.state_symbol(n).unwrap())
            .collect();
        let z = syms.choose(&mut r).unwrap().clone();
        let outer = w.sort(&mut r);
        let f = Formula::at(z.clone(), outer.clone(), w.gen().formula(&z.sort, 4, &mut r));
        let first = m.satisfies(&g, 0, &f).unwrap();
        for u in 1..m.size(&outer) {
            prop_assert_eq!(m.satisfies(&g, u, &f).unwrap(), first);
        }
    }

    #[test]
    fn generated_submodels_keep_nominals_denoting(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let s = w.sort(&mut r);
        let start = r.gen_range(0..m.size(&s));
        let sub = generated_submodel(&m, &[(s.clone(), BTreeSet::from([start]))].into(), &g);
        prop_assert!(sub.model.validate(&w.sig, &w.tab).is_ok());
        for (j, js, _) in sub.model.noms() {
            prop_assert!(sub.model.nom(j).unwrap() < sub.model.size(js));
        }
        // truth inside the generated part is unchanged
        let f = w.gen().formula(&s, 3, &mut r);
        if f.state_symbols().is_empty() {
            let e = sub.embed[&s][&start];
            prop_assert_eq!(m.satisfies(&g, start, &f).unwrap(), sub.model.satisfies(&sub.assignment, e, &f).unwrap());
        }
    }

    #[test]
    fn scheme_instances_are_well_sorted(seed in any::<u64>(), k in 0usize..16) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let ids: Vec<SchemeId> = SystemId::H_AT_FORALL.schemes().iter().chain(SystemId::H_FORALL.schemes()).copied().collect();
        let id = ids[k % ids.len()];
        let f = random_instance(SweepTarget::Scheme(id), &w.sig, &w.tab, 3, &mut r);
        prop_assert!(sort_of(&w.sig, &w.tab, &f).is_ok(), "{}: {}", id.name(), print_formula(&f));
    }

    #[test]
    fn paste0_needs_a_fresh_nominal(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let a = Sort::new("a");
        let phi = FormulaGen::new(&w.sig, &w.tab, Features::AT).formula(&a, 3, &mut r);
        let (z, y) = (w.tab.state_symbol("i").unwrap(), w.tab.state_symbol("i2").unwrap());
        let at = |f: Formula| Formula::at(z.clone(), a.clone(), f);
        let psi = Formula::or(at(phi.clone()), Formula::not(at(phi.clone())));
        let premise = Formula::implies(at(Formula::and(Formula::state(&y), phi.clone())), psi.clone());
        let proof = vec![
            ProofLine { index: 1, sort: a.clone(), formula: premise, just: taut(), note: None },
            ProofLine {
                index: 2,
                sort: a.clone(),
                formula: Formula::implies(at(phi.clone()), psi),
                just: Justification::Paste0 { y: y.clone(), premise: 1 },
                note: None,
            },
        ];
        let got = check_proof(&w.sig, &w.tab, SystemId::H_AT, None, &[], &proof);
        prop_assert_eq!(got.is_ok(), !phi.occurs(&y), "{:?} {}", got.err(), print_formula(&phi));
    }

    #[test]
    fn translation_binds_fresh_and_sorts_atoms(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let f = w.gen().formula(&w.sort(&mut r), 5, &mut r);
        let st = translate_at(&f, "x0").unwrap();
        let mut allowed: BTreeSet<(String, Sort)> = f.free_state_vars().into_iter().map(|x| (x.name.to_string(), x.sort)).collect();
        allowed.insert(("x0".into(), f.sort().clone()));
        let free: BTreeSet<(String, Sort)> = st.free_vars().into_iter().map(|(n, s)| (n.to_string(), s)).collect();
        prop_assert!(free.is_subset(&allowed), "{free:?}");
        prop_assert!(st.rebound_vars().is_empty(), "{} => {}", print_formula(&f), hml::translation::export_fo(&st));
        prop_assert!(atoms_well_sorted(&w, &st));
    }

    #[test]
    fn correspondence_on_random_cases(seed in any::<u64>()) {
        let w = World3::sweep();
        let mut r = rng(seed);
        let m = w.model(&mut r);
        let g = random_assignment(&m, &w.tab, &mut r);
        let s = w.sort(&mut r);
        let f = w.gen().formula(&s, 4, &mut r);
        let u = r.gen_range(0..m.size(&s));
        let (a, b) = correspondence_sides(&m, &g, u, &f).unwrap();
        prop_assert_eq!(a, b);
    }
}

fn taut() -> Justification {
    Justification::Axiom(hml::proof::SchemeInstance::new(SchemeId::TAUT))
}

fn atoms_well_sorted(w: &World3, f: &FOFormula) -> bool {
    match f {
        FOFormula::Eq(a, b) => a.sort() == b.sort(),
        FOFormula::Pred { prop, arg } => {
            matches!(w.tab.lookup(prop), Some((SymbolKind::Prop, s)) if s == arg.sort())
        }
        FOFormula::Rel { op, args } => {
            let d = w.sig.op(op).unwrap();
            let want: Vec<&Sort> = std::iter::once(&d.result).chain(&d.args).collect();
            args.iter().map(FOTerm::sort).collect::<Vec<_>>() == want
        }
        FOFormula::Not(a) => atoms_well_sorted(w, a),
        FOFormula::Or(a, b) | FOFormula::And(a, b) => atoms_well_sorted(w, a) && atoms_well_sorted(w, b),
        FOFormula::Exists { body, .. } | FOFormula::Forall { body, .. } => atoms_well_sorted(w, body),
    }
}

/// Every formula of a depth-2 slice over the demo files, at every world and
/// every assignment.
#[test]
fn correspondence_exhaustive_on_a_depth_two_slice() {
    let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data");
    let (sig, tab) = parse_sig(&std::fs::read_to_string(dir.join("k.sig")).unwrap()).unwrap();
    let (m, _) = parse_mdl(&sig, &tab, &std::fs::read_to_string(dir.join("m.mdl")).unwrap()).unwrap();
    let leaves = |s: &Sort| -> Vec<Formula> {
        let mut v = vec![Formula::top(s.clone())];
        for (n, k, ks) in tab.iter().filter(|(_, _, ks)| *ks == s) {
            v.push(match k {
                SymbolKind::Prop => Formula::prop(n, ks.clone()),
                SymbolKind::Nominal => Formula::nom(n, ks.clone()),
                SymbolKind::StateVar => Formula::svar(n, ks.clone()),
            });
        }
        v
    };
    let x = tab.state_symbol("x").unwrap();
    let mut slice = Vec::new();
    for s in sig.sorts() {
        let ls = leaves(s);
        for l in &ls {
            slice.push(l.clone());
            slice.push(Formula::not(l.clone()));
            for l2 in &ls {
                slice.push(Formula::or(l.clone(), l2.clone()));
            }
            if *s == x.sort {
                slice.push(Formula::forall(x.clone(), l.clone()));
                for z in ["j", "z", "x"] {
                    for outer in sig.sorts() {
                        slice.push(Formula::at(tab.state_symbol(z).unwrap(), outer.clone(), l.clone()));
                    }
                }
            }
        }
        for op in sig.ops().iter().filter(|o| &o.result == s) {
            let choices: Vec<Vec<Formula>> = op.args.iter().map(&leaves).collect();
            let mut tuples: Vec<Vec<Formula>> = vec![vec![]];
            for c in &choices {
                tuples = tuples.iter().flat_map(|t| c.iter().map(move |f| [t.clone(), vec![f.clone()]].concat())).collect();
            }
            for t in tuples {
                slice.push(Formula::app(op, t.clone()));
                slice.push(Formula::boxed(op, t));
            }
        }
    }
    let mut cases = 0;
    for f in &slice {
        for xw in 0..m.size(&x.sort) {
            let mut g = Assignment::new();
            g.set(&x, xw);
            for u in 0..m.size(f.sort()) {
                let (a, b) = correspondence_sides(&m, &g, u, f).unwrap();
                assert_eq!(a, b, "{} at {u} with x = {xw}", print_formula(f));
                cases += 1;
            }
        }
    }
    assert!(slice.len() > 100 && cases > 500, "{} formulas, {cases} cases", slice.len());
}

/// Every line of the hypothesis-free library proofs is valid on 200 random
/// models.
#[test]
fn accepted_theorems_are_valid_on_random_models() {
    let (sig, tab) = lemma_signature();
    let lib = library();
    let mut r = rng(11);
    let models: Vec<Model> =
        (0..200).map(|_| random_model_with(&sig, &tab, &SizeBounds::uniform(3), DENSITY, &mut r)).collect();
    for name in ["NOM_Z", "SYM", "BRIDGE"] {
        let e = &lib[name];
        assert!(e.check().is_ok());
        for l in &e.proof {
            for m in &models {
                assert!(m.valid(&l.formula).unwrap(), "{name} line {}: {}", l.index, print_formula(&l.formula));
            }
        }
    }
}

fn depends_on(proof: &[ProofLine], line: usize, target: usize) -> bool {
    line == target
        || proof.iter().find(|l| l.index == line).unwrap().just.premises().iter().any(|&p| depends_on(proof, p, target))
}

/// Turning an axiom line into a hypothesis fails exactly when a
/// generalization rule depends on it, and then with `HYP_DEPENDENT`.
#[test]
fn hypothesis_flags_propagate() {
    let lib = library();
    for name in ["NOM_Z", "SYM", "BRIDGE"] {
        let e = &lib[name];
        for (k, l) in e.proof.iter().enumerate() {
            if !matches!(l.just, Justification::Axiom(_)) {
                continue;
            }
            let mut proof = e.proof.clone();
            proof[k].just = Justification::Hyp("h".into());
            let hyps = vec![("h".to_string(), l.formula.clone())];
            let tainted = e.proof.iter().find(|g| {
                !matches!(g.just, Justification::Mp(..)) && g.just.premises().iter().any(|&p| depends_on(&e.proof, p, l.index))
            });
            let got = check_proof(&e.sig, &e.tab, e.system, None, &hyps, &proof);
            match tainted {
                None => assert!(got.is_ok(), "{name} line {}", l.index),
                Some(g) => {
                    let f = got.unwrap_err();
                    assert_eq!((f.line, f.reason), (g.index, hml::proof::Reason::HYP_DEPENDENT), "{name} line {}", l.index);
                }
            }
        }
    }
}

/// Removing a line nothing cites never breaks a proof.
#[test]
fn unreferenced_lines_can_be_dropped() {
    let lib = library();
    for name in ["NOM_Z", "SYM", "BRIDGE", "P_PRIME"] {
        let e = &lib[name];
        // pad with a copy of the first non-hypothesis line just before the
        // conclusion; indices only have to increase, so nothing is renumbered
        let mut proof = e.proof.clone();
        let mut last = proof.pop().unwrap();
        let source = proof.iter().find(|l| l.just.premises().is_empty() && !matches!(l.just, Justification::Hyp(_))).unwrap();
        proof.push(ProofLine { index: last.index, note: None, ..source.clone() });
        last.index += 1;
        proof.push(last);
        let check = |p: &[ProofLine]| {
            hml::proof::Checker { sig: &e.sig, tab: &e.tab, system: e.system, theory: e.theory.as_deref(), hyps: &e.hyps }.check(p)
        };
        if let Err(f) = check(&proof) { panic!("{name} padded: {f}") }
        let cited: BTreeSet<usize> = proof.iter().flat_map(|l| l.just.premises()).collect();
        for k in 0..proof.len() - 1 {
            if cited.contains(&proof[k].index) {
                continue;
            }
            let mut q = proof.clone();
            q.remove(k);
            assert!(check(&q).is_ok(), "{name}: dropping line {}", proof[k].index);
        }
    }
}

mod smc_properties {
    use super::*;
    use hml::smc::{
        encode_program, parse_program, print_program, print_stmt, run_program, AExp, BExp, ConcreteConfig, Memory, Stmt,
        Value, DEFAULT_FUEL, DEFAULT_VARS, PGM,
    };

    fn var() -> impl Strategy<Value = String> {
        proptest::sample::select(DEFAULT_VARS.to_vec()).prop_map(String::from)
    }

    fn aexp() -> impl Strategy<Value = AExp> {
        let leaf = prop_oneof![(0u64..=31).prop_map(AExp::Num), var().prop_map(AExp::Var)];
        leaf.prop_recursive(3, 8, 2, |inner| (inner.clone(), inner).prop_map(|(a, b)| AExp::Plus(Box::new(a), Box::new(b))))
    }

    fn stmt() -> impl Strategy<Value = Stmt> {
        let leaf = prop_oneof![Just(Stmt::Skip), (var(), aexp()).prop_map(|(x, a)| Stmt::Assign(x, a))];
        leaf.prop_recursive(4, 16, 3, |inner| {
            let b = || (aexp(), aexp()).prop_map(|(a, b)| BExp(a, b));
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Stmt::seq(a, b)),
                (b(), inner.clone(), inner.clone()).prop_map(|(b, s, t)| Stmt::If(b, Box::new(s), Box::new(t))),
                (b(), inner).prop_map(|(b, s)| Stmt::While(b, Box::new(s))),
            ]
        })
    }

    fn memory() -> impl Strategy<Value = Memory> {
        proptest::collection::btree_map(var(), 0u64..100, 0..6)
            .prop_map(|m| m.into_iter().fold(Memory::new(), |acc, (k, v)| acc.with(&k, v)))
    }

    fn value() -> impl Strategy<Value = Value> {
        prop_oneof![(0u64..100).prop_map(Value::Nat), any::<bool>().prop_map(Value::Bool)]
    }

    proptest! {
        #[test]
        fn programs_print_and_encode_back(s in stmt()) {
            prop_assert_eq!(parse_program(&print_stmt(&s)).unwrap(), s.clone());
            let f = encode_program(&print_stmt(&s)).unwrap();
            prop_assert_eq!(parse_program(&print_program(&f).unwrap()).unwrap(), s);
        }

        #[test]
        fn pgm_sets_m_and_keeps_the_stack(stack in proptest::collection::vec(value(), 0..6), mem in memory()) {
            let start = ConcreteConfig::new(stack, mem);
            let end = run_program(&parse_program(PGM).unwrap(), start.clone(), DEFAULT_FUEL).unwrap();
            prop_assert_eq!(end.memory.get("m"), 1);
            prop_assert_eq!(end.stack, start.stack);
        }

        #[test]
        fn memory_laws(mem in memory(), x in var(), y in var(), n in 0u64..100, k in 0u64..100) {
            // AMem1: set then get
            prop_assert_eq!(mem.clone().with(&x, n).get(&x), n);
            // AMem2: distinct keys commute
            if x != y {
                prop_assert_eq!(mem.clone().with(&x, n).with(&y, k), mem.clone().with(&y, k).with(&x, n));
            }
            // AMem3: the later write shadows
            prop_assert_eq!(mem.clone().with(&x, n).with(&x, k), mem.clone().with(&x, k));
            // AMem0: unwritten identifiers read 0
            prop_assert_eq!(Memory::new().get(&x), 0);
        }
    }
}
