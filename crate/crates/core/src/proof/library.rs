//! Replayable derivations of the hybrid lemmas (Nom_z, Sym, Bridge) and of
//! the SMC property P′.
//!
//! Lines matching a numbered step of the original argument carry the note
//! `(n)`; the primitive steps in between expand its ML and PL justifications.

use std::collections::BTreeMap;

use super::builder::ProofBuilder;
use super::scheme::{splice, SchemeId, SchemeInstance};
use super::{Checked, Checker, Failure, Justification, ProofLine, SystemId, Theory};
use crate::formula::Formula;
use crate::signature::{parse_sig, Operator, Signature, Sort, StateSymbol, SymbolTable};

/// The signature the lemma entries are stated over.
pub const LEMMA_SIG: &str = "\
sort s
sort t
op sigma : s t -> s
op f : t -> t
prop p : s
prop q : t
nom z : t
nom y : t
svar x : t
";

pub fn lemma_signature() -> (Signature, SymbolTable) {
    parse_sig(LEMMA_SIG).expect("fixed signature")
}

pub struct LibraryEntry {
    pub name: &'static str,
    pub system: SystemId,
    pub sig: Signature,
    pub tab: SymbolTable,
    pub theory: Option<Box<dyn Theory>>,
    pub hyps: Vec<(String, Formula)>,
    pub proof: Vec<ProofLine>,
    /// The statement the last line must equal.
    pub conclusion: Formula,
}

impl LibraryEntry {
    pub fn check(&self) -> Result<Checked, Failure> {
        Checker {
            sig: &self.sig,
            tab: &self.tab,
            system: self.system,
            theory: self.theory.as_deref(),
            hyps: &self.hyps,
        }
        .check(&self.proof)
    }
}

pub fn nom_z_statement(z: &StateSymbol, y: &StateSymbol, s: &Sort, phi: &Formula) -> Formula {
    let at = |w: &StateSymbol, f: Formula| Formula::at(w.clone(), s.clone(), f);
    Formula::implies(at(z, Formula::state(y)), Formula::iff(at(z, phi.clone()), at(y, phi.clone())))
}

pub fn sym_statement(z: &StateSymbol, y: &StateSymbol, s: &Sort) -> Formula {
    Formula::implies(Formula::at(z.clone(), s.clone(), Formula::state(y)), Formula::at(y.clone(), s.clone(), Formula::state(z)))
}

/// `σ(…, z, …) ∧ @_z φ → σ(…, φ, …)` with `z` at the 1-based `pos`.
pub fn bridge_statement(op: &Operator, pos: usize, sides: &[Formula], z: &StateSymbol, phi: &Formula) -> Formula {
    let app = |f: Formula| Formula::app(op, splice(sides, pos - 1, f));
    Formula::implies(
        Formula::and(app(Formula::state(z)), Formula::at(z.clone(), op.result.clone(), phi.clone())),
        app(phi.clone()),
    )
}

fn nom_z_into(b: &mut ProofBuilder, z: &StateSymbol, y: &StateSymbol, s: &Sort, phi: &Formula) -> usize {
    let t = z.sort.clone();
    let yf = Formula::state(y);
    let at_y = Formula::at(y.clone(), t.clone(), phi.clone());
    let inner = Formula::iff(phi.clone(), at_y.clone());
    let l1 = b.axiom(SchemeInstance::new(SchemeId::INTRO).state("z", y.clone()).formula("phi", phi.clone()));
    b.note(l1, "(1)");
    let l2 = b.gen_at(z, s, l1);
    b.note(l2, "(2)");
    let l3 = b.k_at(z, s, yf.clone(), inner);
    b.note(l3, "(3)");
    let l4 = b.mp(l2, l3);
    b.note(l4, "(4)");
    let l5 = b.at_iff_dist(z, s, phi.clone(), at_y.clone());
    b.note(l5, "(5)");
    let at = |w: &StateSymbol, f: Formula| Formula::at(w.clone(), s.clone(), f);
    let l6 = b.pl(&[l4, l5], Formula::implies(at(z, yf.clone()), Formula::iff(at(z, phi.clone()), at(z, at_y.clone()))));
    b.note(l6, "(6)");
    let l7 = b.axiom(
        SchemeInstance::new(SchemeId::AGREE)
            .state("y", z.clone())
            .state("z", y.clone())
            .sort("t", s.clone())
            .formula("phi", phi.clone()),
    );
    b.note(l7, "(7)");
    let l8 = b.pl(&[l6, l7], nom_z_statement(z, y, s, phi));
    b.note(l8, "(8)");
    l8
}

/// `@_z^s y → (@_z^s φ ↔ @_y^s φ)` for `z`, `y`, `φ` of one sort.
pub fn nom_z_proof(sig: &Signature, tab: &SymbolTable, z: &StateSymbol, y: &StateSymbol, s: &Sort, phi: &Formula) -> Vec<ProofLine> {
    let mut b = ProofBuilder::new(sig, tab);
    nom_z_into(&mut b, z, y, s, phi);
    b.finish()
}

/// `@_z^s y → @_y^s z`: Nom_z with `φ := z`, then Ref.
pub fn sym_proof(sig: &Signature, tab: &SymbolTable, z: &StateSymbol, y: &StateSymbol, s: &Sort) -> Vec<ProofLine> {
    let mut b = ProofBuilder::new(sig, tab);
    let n = nom_z_into(&mut b, z, y, s, &Formula::state(z));
    let r = b.axiom(SchemeInstance::new(SchemeId::REF).state("z", z.clone()).sort("s", s.clone()));
    b.pl(&[n, r], sym_statement(z, y, s));
    b.finish()
}

/// The literal printed Sym lines. Step 4 is not a tautology, so this does
/// not check; it is kept to document that.
pub fn sym_printed_lines(z: &StateSymbol, y: &StateSymbol, s: &Sort) -> Vec<ProofLine> {
    let at = |w: &StateSymbol, v: &StateSymbol| Formula::at(w.clone(), s.clone(), Formula::state(v));
    let (yz, zy) = (at(y, z), at(z, y));
    let l1 = Formula::implies(Formula::and(yz.clone(), zy.clone()), zy.clone());
    let l3 = Formula::implies(yz.clone(), Formula::implies(zy.clone(), zy.clone()));
    let fs = [
        l1.clone(),
        Formula::implies(l1, l3.clone()),
        l3,
        Formula::implies(Formula::implies(zy.clone(), zy.clone()), zy.clone()),
        Formula::implies(yz.clone(), zy.clone()),
        Formula::implies(zy.clone(), yz.clone()),
        Formula::iff(zy, yz),
    ];
    let taut = || Justification::Axiom(SchemeInstance::new(SchemeId::TAUT));
    let justs = [taut(), taut(), Justification::Mp(1, 2), taut(), taut(), taut(), taut()];
    fs.into_iter()
        .zip(justs)
        .enumerate()
        .map(|(i, (formula, just))| ProofLine { index: i + 1, sort: s.clone(), formula, just, note: Some(format!("({})", i + 1)) })
        .collect()
}

/// Bridge for `op` with `z` at the 1-based `pos` among `sides`.
pub fn bridge_proof(
    sig: &Signature,
    tab: &SymbolTable,
    op: &Operator,
    pos: usize,
    sides: &[Formula],
    z: &StateSymbol,
    phi: &Formula,
) -> Vec<ProofLine> {
    use Formula as F;
    let mut b = ProofBuilder::new(sig, tab);
    let name = op.name.to_string();
    let (si, s) = (op.args[pos - 1].clone(), op.result.clone());
    let zf = F::state(z);
    let nphi = F::not(phi.clone());
    let z_nphi = F::and(zf.clone(), nphi.clone());
    let neg_sides: Vec<Formula> = sides.iter().cloned().map(F::not).collect();
    let app = |f: Formula| F::app(op, splice(sides, pos - 1, f));
    let nbox = |f: Formula| F::boxed(op, splice(&neg_sides, pos - 1, f));
    let big_b = nbox(nphi.clone());
    let dual = |b: &mut ProofBuilder, f: Formula| {
        b.axiom(SchemeInstance::new(SchemeId::DUAL).op(op).list("args", splice(sides, pos - 1, f)))
    };

    // (1) σ(…, z, …) ∧ σ^□(…, ¬φ, …) → σ(…, z ∧ ¬φ, …)
    let ba = b.box_and(&name, pos, &neg_sides, nphi.clone(), F::not(z_nphi.clone()));
    let t = b.taut(F::implies(F::and(nphi.clone(), F::not(z_nphi.clone())), F::not(zf.clone())));
    let mb = b.mono_box(&name, pos, &neg_sides, t);
    let d1 = dual(&mut b, zf.clone());
    let d2 = dual(&mut b, z_nphi.clone());
    let l1 = b.pl(&[ba, mb, d1, d2], F::implies(F::and(app(zf.clone()), big_b.clone()), app(z_nphi.clone())));
    b.note(l1, "(1)");
    let intro = b.axiom(SchemeInstance::new(SchemeId::INTRO).state("z", z.clone()).formula("phi", nphi.clone()));
    let at_i = F::at(z.clone(), si, nphi.clone());
    let l2 = b.pl(&[intro], F::implies(z_nphi.clone(), at_i.clone()));
    b.note(l2, "(2)");
    let l3 = b.mono_dia(&name, pos, sides, l2);
    b.note(l3, "(3)");
    let l4 = b.axiom(
        SchemeInstance::new(SchemeId::BACK)
            .op(op)
            .pos(pos)
            .list("sides", sides.to_vec())
            .state("z", z.clone())
            .formula("psi", nphi.clone()),
    );
    b.note(l4, "(4)");
    let at_s = |f: Formula| F::at(z.clone(), s.clone(), f);
    let l5 = b.pl(&[l3, l4], F::implies(app(z_nphi), at_s(nphi.clone())));
    b.note(l5, "(5)");
    let l6 = b.pl(&[l1, l5], F::implies(F::and(app(zf.clone()), big_b.clone()), at_s(nphi.clone())));
    b.note(l6, "(6)");
    let l7 = b.pl(&[l6], F::implies(app(zf.clone()), F::implies(big_b.clone(), at_s(nphi.clone()))));
    b.note(l7, "(7)");
    let l8 = b.pl(&[l7], F::implies(app(zf.clone()), F::implies(F::not(at_s(nphi)), F::not(big_b))));
    b.note(l8, "(8)");
    let dphi = dual(&mut b, phi.clone());
    let sd = b.axiom(SchemeInstance::new(SchemeId::SELFDUAL).state("z", z.clone()).sort("s", s.clone()).formula("phi", phi.clone()));
    let l9 = b.pl(&[l8, dphi, sd], F::implies(app(zf.clone()), F::implies(at_s(phi.clone()), app(phi.clone()))));
    b.note(l9, "(9)");
    let l10 = b.pl(&[l9], bridge_statement(op, pos, sides, z, phi));
    b.note(l10, "(10)");
    b.finish()
}

fn lemma_entry(name: &'static str, proof: impl FnOnce(&Signature, &SymbolTable) -> (Vec<ProofLine>, Formula)) -> LibraryEntry {
    let (sig, tab) = lemma_signature();
    let (proof, conclusion) = proof(&sig, &tab);
    LibraryEntry { name, system: SystemId::H_AT, sig, tab, theory: None, hyps: vec![], proof, conclusion }
}

pub fn library() -> BTreeMap<&'static str, LibraryEntry> {
    let s = Sort::new("s");
    let z = StateSymbol::nominal("z", "t".into());
    let y = StateSymbol::nominal("y", "t".into());
    let q = Formula::prop("q", "t".into());
    let p = Formula::prop("p", s.clone());
    let mut out = BTreeMap::new();
    out.insert(
        "NOM_Z",
        lemma_entry("NOM_Z", |sig, tab| (nom_z_proof(sig, tab, &z, &y, &s, &q), nom_z_statement(&z, &y, &s, &q))),
    );
    out.insert("SYM", lemma_entry("SYM", |sig, tab| (sym_proof(sig, tab, &z, &y, &s), sym_statement(&z, &y, &s))));
    out.insert(
        "BRIDGE",
        lemma_entry("BRIDGE", |sig, tab| {
            let op = sig.op("sigma").expect("fixed signature").clone();
            let sides = [p.clone()];
            (bridge_proof(sig, tab, &op, 2, &sides, &z, &q), bridge_statement(&op, 2, &sides, &z, &q))
        }),
    );
    let pp = crate::smc::pprime_entry();
    out.insert(pp.name, pp);
    out
}
