//! Programmatic proof construction with derived-rule helpers.
//!
//! Every helper emits primitive lines only (TAUT, scheme instances, MP, UG,
//! Gen@ ...), so the result replays through the checker unchanged. Helpers
//! return the index of the line holding their conclusion.
//!
//! The builder is meant for fixed, known-good constructions: misuse (an
//! ill-sorted line, a bad instance, a premise of the wrong shape) panics.

use super::scheme::{splice, SchemeId, SchemeInstance};
use super::{Justification, Params, ProofLine, Theory};
use crate::formula::Formula;
use crate::signature::{Operator, Signature, Sort, StateSymbol, SymbolTable};
use crate::sortcheck;

pub struct ProofBuilder<'a> {
    sig: &'a Signature,
    tab: &'a SymbolTable,
    theory: Option<&'a dyn Theory>,
    lines: Vec<ProofLine>,
}

impl<'a> ProofBuilder<'a> {
    pub fn new(sig: &'a Signature, tab: &'a SymbolTable) -> Self {
        ProofBuilder { sig, tab, theory: None, lines: Vec::new() }
    }

    pub fn with_theory(mut self, theory: &'a dyn Theory) -> Self {
        self.theory = Some(theory);
        self
    }

    pub fn sig(&self) -> &'a Signature {
        self.sig
    }

    fn op(&self, name: &str) -> &'a Operator {
        self.sig.op(name).unwrap_or_else(|| panic!("unknown operator '{name}'"))
    }

    /// Lines are numbered from 1 without gaps.
    pub fn formula(&self, i: usize) -> &Formula {
        &self.lines[i - 1].formula
    }

    pub fn last(&self) -> usize {
        self.lines.len()
    }

    pub fn note(&mut self, i: usize, text: impl Into<String>) {
        self.lines[i - 1].note = Some(text.into());
    }

    #[track_caller]
    fn push(&mut self, formula: Formula, just: Justification) -> usize {
        let sort = sortcheck::sort_of(self.sig, self.tab, &formula)
            .unwrap_or_else(|e| panic!("ill-sorted line {formula}: {e}"));
        let index = self.lines.len() + 1;
        self.lines.push(ProofLine { index, sort, formula, just, note: None });
        index
    }

    pub fn hyp(&mut self, name: &str, f: Formula) -> usize {
        self.push(f, Justification::Hyp(name.into()))
    }

    #[track_caller]
    pub fn axiom(&mut self, inst: SchemeInstance) -> usize {
        let f = inst.instantiate(self.sig, self.tab).unwrap_or_else(|e| panic!("bad {} instance: {e}", inst.scheme));
        self.push(f, Justification::Axiom(inst))
    }

    /// A TAUT line; the formula is its own binding.
    #[track_caller]
    pub fn taut(&mut self, f: Formula) -> usize {
        debug_assert_eq!(super::taut::is_tautology(&f), Ok(true), "not a tautology: {f}");
        self.push(f, Justification::Axiom(SchemeInstance::new(SchemeId::TAUT)))
    }

    #[track_caller]
    pub fn thax(&mut self, name: &str, params: Params) -> usize {
        let th = self.theory.expect("theory axioms need a theory");
        let f = th.axiom(name, &params).unwrap_or_else(|e| panic!("bad {name} instance: {e}"));
        self.push(f, Justification::TheoryAxiom { name: name.into(), params })
    }

    /// Line `j` must read `line i → ψ`; emits `ψ`.
    #[track_caller]
    pub fn mp(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = self.formula(j).as_implies().unwrap_or_else(|| panic!("line {j} is not an implication"));
        assert_eq!(a, self.formula(i), "line {j} does not start with line {i}");
        let b = b.clone();
        self.push(b, Justification::Mp(i, j))
    }

    /// Propositional consequence: TAUT `p1 → (p2 → … → concl)` and an MP chain.
    #[track_caller]
    pub fn pl(&mut self, premises: &[usize], concl: Formula) -> usize {
        let mut t = concl;
        for &p in premises.iter().rev() {
            t = Formula::implies(self.formula(p).clone(), t);
        }
        let mut cur = self.taut(t);
        for &p in premises {
            cur = self.mp(p, cur);
        }
        cur
    }

    /// `σ^□(sides with line i at pos)`; `pos` is 1-based.
    pub fn ug(&mut self, op: &str, pos: usize, i: usize, sides: Vec<Formula>) -> usize {
        let f = Formula::boxed(self.op(op), splice(&sides, pos - 1, self.formula(i).clone()));
        self.push(f, Justification::Ug { op: op.into(), pos, premise: i, sides })
    }

    pub fn gen(&mut self, x: &StateSymbol, i: usize) -> usize {
        let f = Formula::forall(x.clone(), self.formula(i).clone());
        self.push(f, Justification::Gen { var: x.clone(), premise: i })
    }

    pub fn gen_at(&mut self, z: &StateSymbol, s: &Sort, i: usize) -> usize {
        let f = Formula::at(z.clone(), s.clone(), self.formula(i).clone());
        self.push(f, Justification::GenAt { sym: z.clone(), premise: i })
    }

    #[track_caller]
    pub fn bcast(&mut self, s: &Sort, i: usize) -> usize {
        let Formula::At { sym, body, .. } = self.formula(i) else { panic!("line {i} is not @_z φ") };
        let f = Formula::at(sym.clone(), s.clone(), (**body).clone());
        self.push(f, Justification::Broadcast { sort: s.clone(), premise: i })
    }

    /// From `@_z (y ∧ φ) → ψ` emits `@_z φ → ψ`.
    #[track_caller]
    pub fn paste0(&mut self, y: &StateSymbol, i: usize) -> usize {
        let (l, psi) = self.formula(i).as_implies().expect("premise is an implication");
        let Formula::At { sym, sort, body } = l else { panic!("premise is not @_z (y ∧ φ) → ψ") };
        let (_, phi) = body.as_and().expect("premise is not @_z (y ∧ φ) → ψ");
        let f = Formula::implies(Formula::at(sym.clone(), sort.clone(), phi.clone()), psi.clone());
        self.push(f, Justification::Paste0 { y: y.clone(), premise: i })
    }

    // Derived rules.

    /// From `A → B`: `σ^□(…, A, …) → σ^□(…, B, …)`.
    pub fn mono_box(&mut self, op: &str, pos: usize, sides: &[Formula], i: usize) -> usize {
        let (a, b) = self.formula(i).as_implies().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let boxed = self.ug(op, pos, i, sides.to_vec());
        let k = self.axiom(
            SchemeInstance::new(SchemeId::K_SIGMA_AX)
                .op(self.op(op))
                .pos(pos)
                .list("sides", sides.to_vec())
                .formula("phi", a)
                .formula("chi", b),
        );
        self.mp(boxed, k)
    }

    /// From `A → B`: `σ(…, A, …) → σ(…, B, …)`, through the duals.
    pub fn mono_dia(&mut self, op: &str, pos: usize, sides: &[Formula], i: usize) -> usize {
        let (a, b) = self.formula(i).as_implies().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let contra = self.pl(&[i], Formula::implies(Formula::not(b.clone()), Formula::not(a.clone())));
        let neg_sides: Vec<Formula> = sides.iter().cloned().map(Formula::not).collect();
        let m = self.mono_box(op, pos, &neg_sides, contra);
        let o = self.op(op);
        let da = self.axiom(SchemeInstance::new(SchemeId::DUAL).op(o).list("args", splice(sides, pos - 1, a.clone())));
        let db = self.axiom(SchemeInstance::new(SchemeId::DUAL).op(o).list("args", splice(sides, pos - 1, b.clone())));
        let concl = Formula::implies(Formula::app(o, splice(sides, pos - 1, a)), Formula::app(o, splice(sides, pos - 1, b)));
        self.pl(&[m, da, db], concl)
    }

    /// From `A → B`: `@_z^s A → @_z^s B`.
    pub fn mono_at(&mut self, z: &StateSymbol, s: &Sort, i: usize) -> usize {
        let (a, b) = self.formula(i).as_implies().map(|(a, b)| (a.clone(), b.clone())).expect("implication");
        let g = self.gen_at(z, s, i);
        let k = self.k_at(z, s, a, b);
        self.mp(g, k)
    }

    pub fn k_at(&mut self, z: &StateSymbol, s: &Sort, phi: Formula, psi: Formula) -> usize {
        self.axiom(
            SchemeInstance::new(SchemeId::K_AT).state("z", z.clone()).sort("s", s.clone()).formula("phi", phi).formula("psi", psi),
        )
    }

    /// `σ^□(…, A, …) ∧ σ^□(…, B, …) → σ^□(…, A ∧ B, …)`.
    pub fn box_and(&mut self, op: &str, pos: usize, sides: &[Formula], a: Formula, b: Formula) -> usize {
        let ab = Formula::and(a.clone(), b.clone());
        let t = self.taut(Formula::implies(a.clone(), Formula::implies(b.clone(), ab.clone())));
        let l1 = self.mono_box(op, pos, sides, t);
        let o = self.op(op);
        let k2 = self.axiom(
            SchemeInstance::new(SchemeId::K_SIGMA_AX)
                .op(o)
                .pos(pos)
                .list("sides", sides.to_vec())
                .formula("phi", b.clone())
                .formula("chi", ab.clone()),
        );
        let bx = |f: Formula| Formula::boxed(o, splice(sides, pos - 1, f));
        self.pl(&[l1, k2], Formula::implies(Formula::and(bx(a), bx(b)), bx(ab)))
    }

    /// `(@A → @B) → @(A → B)`.
    fn at_imp_rev(&mut self, z: &StateSymbol, s: &Sort, a: &Formula, b: &Formula) -> usize {
        let at = |f: Formula| Formula::at(z.clone(), s.clone(), f);
        let imp = Formula::implies(a.clone(), b.clone());
        let sd = self.axiom(SchemeInstance::new(SchemeId::SELFDUAL).state("z", z.clone()).sort("s", s.clone()).formula("phi", a.clone()));
        let t1 = self.taut(Formula::implies(Formula::not(a.clone()), imp.clone()));
        let m1 = self.mono_at(z, s, t1);
        let t2 = self.taut(Formula::implies(b.clone(), imp.clone()));
        let m2 = self.mono_at(z, s, t2);
        self.pl(&[sd, m1, m2], Formula::implies(Formula::implies(at(a.clone()), at(b.clone())), at(imp)))
    }

    /// `@X ∧ @Y → @(X ∧ Y)`.
    fn at_and(&mut self, z: &StateSymbol, s: &Sort, x: &Formula, y: &Formula) -> usize {
        let at = |f: Formula| Formula::at(z.clone(), s.clone(), f);
        let xy = Formula::and(x.clone(), y.clone());
        let t = self.taut(Formula::implies(x.clone(), Formula::implies(y.clone(), xy.clone())));
        let g = self.mono_at(z, s, t);
        let k = self.k_at(z, s, y.clone(), xy.clone());
        self.pl(&[g, k], Formula::implies(Formula::and(at(x.clone()), at(y.clone())), at(xy)))
    }

    /// `@(A ↔ B) ↔ (@A ↔ @B)`.
    pub fn at_iff_dist(&mut self, z: &StateSymbol, s: &Sort, a: Formula, b: Formula) -> usize {
        let at = |f: Formula| Formula::at(z.clone(), s.clone(), f);
        let iff = Formula::iff(a.clone(), b.clone());
        let ab = Formula::implies(a.clone(), b.clone());
        let ba = Formula::implies(b.clone(), a.clone());
        let t1 = self.taut(Formula::implies(iff.clone(), ab.clone()));
        let f1 = self.mono_at(z, s, t1);
        let k1 = self.k_at(z, s, a.clone(), b.clone());
        let t2 = self.taut(Formula::implies(iff.clone(), ba.clone()));
        let f2 = self.mono_at(z, s, t2);
        let k2 = self.k_at(z, s, b.clone(), a.clone());
        let r1 = self.at_imp_rev(z, s, &a, &b);
        let r2 = self.at_imp_rev(z, s, &b, &a);
        let c = self.at_and(z, s, &ab, &ba);
        self.pl(&[f1, k1, f2, k2, r1, r2, c], Formula::iff(at(iff), Formula::iff(at(a), at(b))))
    }

    pub fn finish(self) -> Vec<ProofLine> {
        self.lines
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proof::{check_proof, SystemId};
    use crate::signature::parse_sig;
    use crate::syntax::parse_formula;

    fn setup() -> (Signature, SymbolTable) {
        parse_sig("sort s\nsort t\nop g : s t -> s\nprop p : s\nprop q : t\nprop r : t\nnom j : t\n").unwrap()
    }

    #[test]
    fn derived_rules_replay() {
        let (sig, tab) = setup();
        let pf = |t: &str| parse_formula(&sig, &tab, t).unwrap();
        let mut b = ProofBuilder::new(&sig, &tab);
        let t = b.taut(pf("(-> (and q r) q)"));
        let side = [pf("p")];
        let mb = b.mono_box("g", 2, &side, t);
        assert_eq!(b.formula(mb), &pf("(-> (box g p (and q r)) (box g p q))"));
        let md = b.mono_dia("g", 2, &side, t);
        assert_eq!(b.formula(md), &pf("(-> (op g p (and q r)) (op g p q))"));
        let ba = b.box_and("g", 2, &side, pf("q"), pf("r"));
        assert_eq!(b.formula(ba), &pf("(-> (and (box g p q) (box g p r)) (box g p (and q r)))"));
        let j = tab.state_symbol("j").unwrap();
        let d = b.at_iff_dist(&j, &"s".into(), pf("q"), pf("r"));
        assert_eq!(b.formula(d), &pf("(<-> (@ j s (<-> q r)) (<-> (@ j s q) (@ j s r)))"));
        let proof = b.finish();
        check_proof(&sig, &tab, SystemId::H_AT, None, &[], &proof).unwrap();
    }
}
