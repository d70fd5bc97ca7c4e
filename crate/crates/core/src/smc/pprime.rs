//! The replay of P′: `config(vs, mem) → [c(pgm)] @_{mem′} get(m, 1)` under
//! the two hypotheses about `pgm`, where `mem′` is the state variable `memp`
//! and `mf = set(set(set(mem, i2, 2), i1, 1), m, 1)`.

use super::{encode_program, smc_signature, Encoder, SmcTheory};
use crate::formula::Formula;
use crate::proof::builder::ProofBuilder;
use crate::proof::library::LibraryEntry;
use crate::proof::{Params, ProofLine, SchemeId, SchemeInstance, SystemId};
use crate::signature::{Signature, Sort, StateSymbol, SymbolTable};

pub const PGM: &str = "i1:= 1; i2:= 2; if i1<=i2 then m:= i1 else m:= i2";

/// The formulas the proof talks about.
pub struct Parts {
    pub sig: Signature,
    pub tab: SymbolTable,
    /// `config(vs, mem)`
    pub cfg: Formula,
    /// `c(pgm)`
    pub prog: Formula,
    pub mf: Formula,
    pub memp: StateSymbol,
    /// `get(m, 1)`
    pub goal: Formula,
}

impl Parts {
    pub fn new() -> Self {
        let (sig, tab) = smc_signature();
        let e = Encoder::new(&sig);
        let mem_s = Sort::new("Mem");
        let vs = Formula::prop("vs", Sort::new("ValStack"));
        let mem = Formula::prop("mem", mem_s.clone());
        let num = |n| e.numeral(n).expect("small numeral");
        let var = |x| e.var(x).expect("default variable");
        let set = |m, x, n| e.app("set", vec![m, var(x), num(n)]);
        let mf = set(set(set(mem.clone(), "i2", 2), "i1", 1), "m", 1);
        let pgm = encode_program(PGM).expect("fixed program");
        Parts {
            cfg: e.app("config", vec![vs, mem]),
            prog: e.app("c_stmt", vec![pgm]),
            mf,
            memp: StateSymbol::var("memp", mem_s),
            goal: e.app("get", vec![var("m"), num(1)]),
            sig,
            tab,
        }
    }

    /// `[c(pgm)] g`
    pub fn after(&self, g: Formula) -> Formula {
        Formula::boxed(self.sig.op("dia").expect("SMC signature"), vec![self.prog.clone(), g])
    }

    fn config(&self, s: Formula, m: Formula) -> Formula {
        Formula::app(self.sig.op("config").expect("SMC signature"), vec![s, m])
    }

    fn vs(&self) -> Formula {
        Formula::prop("vs", Sort::new("ValStack"))
    }

    /// `@_{mem′}^s f`
    fn at(&self, sort: &str, f: Formula) -> Formula {
        Formula::at(self.memp.clone(), Sort::new(sort), f)
    }
}

impl Default for Parts {
    fn default() -> Self {
        Self::new()
    }
}

pub fn pprime_statement() -> Formula {
    let p = Parts::new();
    Formula::implies(p.cfg.clone(), p.after(p.at("Config", p.goal.clone())))
}

/// Hypotheses `h1` (the imported result about `pgm`) and `h2`.
pub fn pprime_hyps(p: &Parts) -> Vec<(String, Formula)> {
    vec![
        ("h1".into(), Formula::implies(p.cfg.clone(), p.after(p.config(p.vs(), p.mf.clone())))),
        ("h2".into(), Formula::implies(p.cfg.clone(), p.after(p.config(p.vs(), Formula::state(&p.memp))))),
    ]
}

fn params(kv: &[(&str, &Formula)]) -> Params {
    kv.iter().map(|(k, v)| (k.to_string(), (*v).clone())).collect()
}

/// The hypotheses and the primitive proof; numbered steps carry notes
/// `(1)` to `(15)`.
pub fn build_pprime_proof() -> (Vec<(String, Formula)>, Vec<ProofLine>) {
    let p = Parts::new();
    let th = SmcTheory::new();
    let hyps = pprime_hyps(&p);
    let lines = build_with(&p, &th, &hyps);
    (hyps, lines)
}

fn build_with(p: &Parts, th: &SmcTheory, hyps: &[(String, Formula)]) -> Vec<ProofLine> {
    use Formula as F;
    let mut b = ProofBuilder::new(&p.sig, &p.tab).with_theory(th);
    let sides = [p.prog.clone()];
    let memp = F::state(&p.memp);
    let vs = p.vs();
    let vs2 = F::and(vs.clone(), vs.clone());
    let a = p.config(vs.clone(), p.mf.clone());
    let c = p.config(vs.clone(), memp.clone());
    let at_mf = p.at("Mem", p.mf.clone());
    let joined = p.config(vs2.clone(), F::and(p.mf.clone(), memp.clone()));
    let pasted = p.config(vs2.clone(), at_mf.clone());
    let back = p.at("Config", p.mf.clone());

    let l1 = b.hyp(&hyps[0].0, hyps[0].1.clone());
    b.note(l1, "(1)");
    let l2 = b.hyp(&hyps[1].0, hyps[1].1.clone());
    b.note(l2, "(2)");
    let l3 = b.pl(&[l1, l2], F::implies(p.cfg.clone(), F::and(p.after(a.clone()), p.after(c.clone()))));
    b.note(l3, "(3)");
    let l4 = b.box_and("dia", 2, &sides, a.clone(), c.clone());
    b.note(l4, "(4)");
    let l5 = b.thax("NOCONFUSION", params(&[("phi1", &vs), ("psi1", &p.mf), ("phi2", &vs), ("psi2", &memp)]));
    b.note(l5, "(5)");
    let intro = b.axiom(SchemeInstance::new(SchemeId::INTRO).state("z", p.memp.clone()).formula("phi", p.mf.clone()));
    let inner = b.pl(&[intro], F::implies(F::and(p.mf.clone(), memp.clone()), at_mf.clone()));
    let l6 = b.mono_dia("config", 2, std::slice::from_ref(&vs2), inner);
    b.note(l6, "(6)");
    let l7 = b.axiom(
        SchemeInstance::new(SchemeId::BACK)
            .op(p.sig.op("config").expect("SMC signature"))
            .pos(2)
            .list("sides", vec![vs2.clone()])
            .state("z", p.memp.clone())
            .formula("psi", p.mf.clone()),
    );
    b.note(l7, "(7)");
    let l8 = b.ug("dia", 2, l7, sides.to_vec());
    b.note(l8, "(8)");
    let k = b.axiom(
        SchemeInstance::new(SchemeId::K_SIGMA_AX)
            .op(p.sig.op("dia").expect("SMC signature"))
            .pos(2)
            .list("sides", sides.to_vec())
            .formula("phi", pasted.clone())
            .formula("chi", back.clone()),
    );
    let l9 = b.mp(l8, k);
    b.note(l9, "(9)");
    let e = Encoder::new(&p.sig);
    let prefix = e.app(
        "set",
        vec![
            e.app("set", vec![F::prop("mem", Sort::new("Mem")), e.var("i2").unwrap(), e.numeral(2).unwrap()]),
            e.var("i1").unwrap(),
            e.numeral(1).unwrap(),
        ],
    );
    let l10 = b.thax("AMEM1", params(&[("mem", &prefix), ("x", &e.var("m").unwrap()), ("n", &e.numeral(1).unwrap())]));
    b.note(l10, "(10)");
    let l11 = b.mono_at(&p.memp, &Sort::new("Config"), l10);
    b.note(l11, "(11)");
    let l12 = b.mono_box("dia", 2, &sides, l11);
    b.note(l12, "(12)");
    let l13 = b.mono_box("dia", 2, &sides, l5);
    b.note(l13, "(13)");
    let l14 = b.mono_box("dia", 2, &sides, l6);
    b.note(l14, "(14)");
    debug_assert_eq!(b.formula(l13), &F::implies(p.after(F::and(a, c)), p.after(joined)));
    debug_assert_eq!(b.formula(l14).as_implies().map(|(_, r)| r), Some(&p.after(pasted)));
    let l15 = b.pl(&[l3, l4, l13, l14, l9, l12], pprime_statement());
    b.note(l15, "(15)");
    b.finish()
}

/// P′ as a library entry in `H_AT` with the SMC theory.
pub fn pprime_entry() -> LibraryEntry {
    let p = Parts::new();
    let th = SmcTheory::new();
    let hyps = pprime_hyps(&p);
    let proof = build_with(&p, &th, &hyps);
    LibraryEntry {
        name: "P_PRIME",
        system: SystemId::H_AT,
        sig: p.sig,
        tab: p.tab,
        theory: Some(Box::new(th)),
        hyps,
        proof,
        conclusion: pprime_statement(),
    }
}
