//! The SMC theory: dynamic-logic axioms for composition, choice, iteration
//! and tests, the machine's transition axioms, the memory axioms and
//! NOCONFUSION for `config`.
//!
//! Every axiom is a generator over named, sorted parameters. Arithmetic and
//! distinctness side conditions are computed from ground parameters, never
//! taken on trust.

use super::{decode_value, numeral_name, numeral_value, smc_signature, var_name, Encoder, MAX_NUMERAL};
use crate::formula::Formula;
use crate::proof::{Params, Theory, TheoryError};
use crate::signature::{Signature, Sort, SymbolTable};
use crate::sortcheck::sort_of;

pub const AXIOMS: [&str; 22] = [
    "A_UNION",
    "A_SEQ",
    "A_STAR",
    "A_TEST",
    "A_NEG_TEST",
    "CSTMT",
    "AMEM0",
    "AMEM1",
    "AMEM2",
    "AMEM3",
    "AINT",
    "AID",
    "DPLUS",
    "APLUS",
    "DLEQ",
    "ALEQ",
    "ASKIP",
    "DASGN",
    "AASGN",
    "DIF",
    "DWHILE",
    "NOCONFUSION",
];

/// Parameter slots `(name, sort)`; a trailing `?` marks a slot that may be
/// omitted because its value is computed.
pub fn slots(name: &str) -> Option<&'static [(&'static str, &'static str)]> {
    Some(match name {
        "A_UNION" | "A_SEQ" => &[("pi", "CtrlStack"), ("pi2", "CtrlStack"), ("gamma", "Config")],
        "A_STAR" => &[("pi", "CtrlStack"), ("gamma", "Config")],
        "A_TEST" => &[("v", "Val"), ("vs", "ValStack"), ("mem", "Mem")],
        "A_NEG_TEST" => &[("v", "Val"), ("v2", "Val"), ("vs", "ValStack"), ("mem", "Mem"), ("gamma", "Config")],
        "CSTMT" => &[("s1", "Stmt"), ("s2", "Stmt")],
        "AMEM0" => &[("x", "Var")],
        "AMEM1" => &[("mem", "Mem"), ("x", "Var"), ("n", "Nat")],
        "AMEM2" => &[("mem", "Mem"), ("x", "Var"), ("n", "Nat"), ("y", "Var"), ("m", "Nat")],
        "AMEM3" => &[("mem", "Mem"), ("x", "Var"), ("n", "Nat"), ("m", "Nat")],
        "AINT" => &[("vs", "ValStack"), ("mem", "Mem"), ("n", "Nat")],
        "AID" => &[("vs", "ValStack"), ("mem", "Mem"), ("x", "Var"), ("n", "Nat")],
        "DPLUS" | "DLEQ" => &[("a1", "AExp"), ("a2", "AExp")],
        "APLUS" => &[("n1", "Nat"), ("n2", "Nat"), ("n?", "Nat"), ("vs", "ValStack"), ("mem", "Mem")],
        "ALEQ" => &[("n1", "Nat"), ("n2", "Nat"), ("t?", "Bool"), ("vs", "ValStack"), ("mem", "Mem")],
        "ASKIP" => &[("gamma", "Config")],
        "DASGN" => &[("x", "Var"), ("a", "AExp")],
        "AASGN" => &[("n", "Nat"), ("vs", "ValStack"), ("mem", "Mem"), ("x", "Var")],
        "DIF" => &[("b", "BExp"), ("s1", "Stmt"), ("s2", "Stmt")],
        "DWHILE" => &[("b", "BExp"), ("s", "Stmt")],
        "NOCONFUSION" => &[("phi1", "ValStack"), ("psi1", "Mem"), ("phi2", "ValStack"), ("psi2", "Mem")],
        _ => return None,
    })
}

pub struct SmcTheory {
    sig: Signature,
    tab: SymbolTable,
}

impl Default for SmcTheory {
    fn default() -> Self {
        Self::new()
    }
}

impl SmcTheory {
    /// Over [`smc_signature`].
    pub fn new() -> Self {
        let (sig, tab) = smc_signature();
        SmcTheory { sig, tab }
    }

    /// Over a user signature, which must declare every SMC operator and
    /// numeral with its standard profile.
    pub fn over(sig: &Signature, tab: &SymbolTable) -> Result<Self, String> {
        let (base, _) = smc_signature();
        for op in base.ops().iter().filter(|o| o.result.name() != "Var") {
            match sig.op(&op.name) {
                Some(o) if o == op => {}
                Some(_) => return Err(format!("operator '{}' does not have its SMC profile", op.name)),
                None => return Err(format!("signature lacks the SMC operator '{}'", op.name)),
            }
        }
        Ok(SmcTheory { sig: sig.clone(), tab: tab.clone() })
    }

    pub fn signature(&self) -> (&Signature, &SymbolTable) {
        (&self.sig, &self.tab)
    }
}

struct Args<'a> {
    params: &'a Params,
}

impl Args<'_> {
    fn get(&self, k: &str) -> Formula {
        self.params[k].clone()
    }

    fn opt(&self, k: &str) -> Option<&Formula> {
        self.params.get(k)
    }

    fn numeral(&self, k: &str) -> Result<u64, TheoryError> {
        numeral_value(&self.params[k]).ok_or_else(|| side(format!("{k} must be a numeral n0…n{MAX_NUMERAL}, found {}", self.params[k])))
    }

    fn var(&self, k: &str) -> Result<&str, TheoryError> {
        var_name(&self.params[k]).ok_or_else(|| side(format!("{k} must be a program-variable constant, found {}", self.params[k])))
    }
}

fn side(msg: String) -> TheoryError {
    TheoryError::SideCondition(msg)
}

impl Theory for SmcTheory {
    fn name(&self) -> &str {
        "smc"
    }

    fn axiom_names(&self) -> Vec<&'static str> {
        AXIOMS.to_vec()
    }

    fn axiom(&self, name: &str, params: &Params) -> Result<Formula, TheoryError> {
        use Formula as F;
        let spec = slots(name).ok_or_else(|| TheoryError::Unknown(name.into()))?;
        let slot_name = |s: &'static str| s.trim_end_matches('?');
        if let Some(k) = params.keys().find(|k| !spec.iter().any(|(s, _)| slot_name(s) == k.as_str())) {
            return Err(TheoryError::UnexpectedParam(k.clone()));
        }
        for &(slot, sort) in spec {
            match params.get(slot_name(slot)) {
                Some(f) => {
                    let s = sort_of(&self.sig, &self.tab, f)?;
                    if s.name() != sort {
                        return Err(TheoryError::ParamSort { name: slot_name(slot).into(), expected: Sort::new(sort) });
                    }
                }
                None if slot.ends_with('?') => {}
                None => return Err(TheoryError::MissingParam(slot.into())),
            }
        }
        let a = Args { params };
        let e = Encoder::new(&self.sig);
        let op = |n: &str, args: Vec<Formula>| e.app(n, args);
        let bx = |pi: Formula, g: Formula| F::boxed(self.sig.op("dia").expect("SMC signature"), vec![pi, g]);
        let config = |s: Formula, m: Formula| op("config", vec![s, m]);
        let cons = |v: Formula, s: Formula| op("cons", vec![v, s]);
        let nat = |n: Formula| op("nat2val", vec![n]);
        let boolean = |b: bool| op("bool2val", vec![e.boolean(b)]);
        let set = |m: Formula, x: Formula, n: Formula| op("set", vec![m, x, n]);
        let get = |x: Formula, n: Formula| op("get", vec![x, n]);
        let seq = |a: Formula, b: Formula| op("seq", vec![a, b]);
        let (c_aexp, c_bexp, c_stmt) = (
            |a: Formula| op("c_aexp", vec![a]),
            |b: Formula| op("c_bexp", vec![b]),
            |s: Formula| op("c_stmt", vec![s]),
        );
        Ok(match name {
            "A_UNION" => {
                let (pi, pi2, g) = (a.get("pi"), a.get("pi2"), a.get("gamma"));
                F::iff(bx(op("union", vec![pi.clone(), pi2.clone()]), g.clone()), F::and(bx(pi, g.clone()), bx(pi2, g)))
            }
            "A_SEQ" => {
                let (pi, pi2, g) = (a.get("pi"), a.get("pi2"), a.get("gamma"));
                F::iff(bx(seq(pi.clone(), pi2.clone()), g.clone()), bx(pi, bx(pi2, g)))
            }
            "A_STAR" => {
                let (pi, g) = (a.get("pi"), a.get("gamma"));
                let star = op("star", vec![pi.clone()]);
                F::iff(bx(star.clone(), g.clone()), F::and(g.clone(), bx(pi, bx(star, g))))
            }
            "A_TEST" => {
                let (v, vs, mem) = (a.get("v"), a.get("vs"), a.get("mem"));
                F::implies(config(cons(v.clone(), vs.clone()), mem.clone()), bx(op("test", vec![v]), config(vs, mem)))
            }
            "A_NEG_TEST" => {
                let (v, v2) = (a.get("v"), a.get("v2"));
                let ground = |k: &str, f: &Formula| {
                    decode_value(f).map_err(|_| side(format!("{k} must be a ground value, found {f}")))
                };
                if ground("v", &v)? == ground("v2", &v2)? {
                    return Err(side("v and v2 must be distinct values".into()));
                }
                F::implies(config(cons(v, a.get("vs")), a.get("mem")), bx(op("test", vec![v2]), a.get("gamma")))
            }
            "CSTMT" => {
                let (s1, s2) = (a.get("s1"), a.get("s2"));
                F::iff(c_stmt(op("seq_s", vec![s1.clone(), s2.clone()])), seq(c_stmt(s1), c_stmt(s2)))
            }
            "AMEM0" => F::implies(op("empty", vec![]), get(a.get("x"), op(&numeral_name(0), vec![]))),
            "AMEM1" => {
                let (x, n) = (a.get("x"), a.get("n"));
                F::implies(set(a.get("mem"), x.clone(), n.clone()), get(x, n))
            }
            "AMEM2" => {
                if a.var("x")? == a.var("y")? {
                    return Err(side("x and y must be distinct variables".into()));
                }
                let (mem, x, n, y, m) = (a.get("mem"), a.get("x"), a.get("n"), a.get("y"), a.get("m"));
                F::iff(
                    set(set(mem.clone(), x.clone(), n.clone()), y.clone(), m.clone()),
                    set(set(mem, y, m), x, n),
                )
            }
            "AMEM3" => {
                let (mem, x, n, m) = (a.get("mem"), a.get("x"), a.get("n"), a.get("m"));
                F::implies(set(set(mem.clone(), x.clone(), n), x.clone(), m.clone()), set(mem, x, m))
            }
            "AINT" => {
                a.numeral("n")?;
                let (vs, mem, n) = (a.get("vs"), a.get("mem"), a.get("n"));
                F::implies(
                    config(vs.clone(), mem.clone()),
                    bx(c_aexp(op("nat2aexp", vec![n.clone()])), config(cons(nat(n), vs), mem)),
                )
            }
            "AID" => {
                let (vs, mem, x, n) = (a.get("vs"), a.get("mem"), a.get("x"), a.get("n"));
                let m = set(mem, x.clone(), n.clone());
                F::implies(config(vs.clone(), m.clone()), bx(c_aexp(op("var2aexp", vec![x])), config(cons(nat(n), vs), m)))
            }
            "DPLUS" => {
                let (a1, a2) = (a.get("a1"), a.get("a2"));
                F::iff(
                    c_aexp(op("plus_e", vec![a1.clone(), a2.clone()])),
                    seq(c_aexp(a1), seq(c_aexp(a2), op("plus", vec![]))),
                )
            }
            "APLUS" => {
                let sum = a.numeral("n1")? + a.numeral("n2")?;
                if sum > MAX_NUMERAL {
                    return Err(side(format!("n1 + n2 = {sum} exceeds n{MAX_NUMERAL}")));
                }
                let n = op(&numeral_name(sum), vec![]);
                if let Some(given) = a.opt("n").filter(|g| **g != n) {
                    return Err(side(format!("n must be n1 + n2 = {n}, found {given}")));
                }
                let (vs, mem) = (a.get("vs"), a.get("mem"));
                F::implies(
                    config(cons(nat(a.get("n2")), cons(nat(a.get("n1")), vs.clone())), mem.clone()),
                    bx(op("plus", vec![]), config(cons(nat(n), vs), mem)),
                )
            }
            "DLEQ" => {
                let (a1, a2) = (a.get("a1"), a.get("a2"));
                F::iff(
                    c_bexp(op("leq_e", vec![a1.clone(), a2.clone()])),
                    seq(c_aexp(a2), seq(c_aexp(a1), op("leq", vec![]))),
                )
            }
            "ALEQ" => {
                let truth = a.numeral("n1")? <= a.numeral("n2")?;
                let t = e.boolean(truth);
                if let Some(given) = a.opt("t").filter(|g| **g != t) {
                    return Err(side(format!("t must be {truth} for n1 <= n2, found {given}")));
                }
                let (vs, mem) = (a.get("vs"), a.get("mem"));
                F::implies(
                    config(cons(nat(a.get("n1")), cons(nat(a.get("n2")), vs.clone())), mem.clone()),
                    bx(op("leq", vec![]), config(cons(op("bool2val", vec![t]), vs), mem)),
                )
            }
            "ASKIP" => {
                let g = a.get("gamma");
                F::implies(g.clone(), bx(c_stmt(op("skip", vec![])), g))
            }
            "DASGN" => {
                let (x, ae) = (a.get("x"), a.get("a"));
                F::iff(c_stmt(op("assign", vec![x.clone(), ae.clone()])), seq(c_aexp(ae), op("asgn", vec![x])))
            }
            "AASGN" => {
                let (n, vs, mem, x) = (a.get("n"), a.get("vs"), a.get("mem"), a.get("x"));
                F::implies(
                    config(cons(nat(n.clone()), vs.clone()), mem.clone()),
                    bx(op("asgn", vec![x.clone()]), config(vs, set(mem, x, n))),
                )
            }
            "DIF" => {
                let (b, s1, s2) = (a.get("b"), a.get("s1"), a.get("s2"));
                let branch = |v: bool, s: Formula| seq(op("test", vec![boolean(v)]), c_stmt(s));
                F::iff(
                    c_stmt(op("ite", vec![b.clone(), s1.clone(), s2.clone()])),
                    seq(c_bexp(b), op("union", vec![branch(true, s1), branch(false, s2)])),
                )
            }
            "DWHILE" => {
                let (b, s) = (a.get("b"), a.get("s"));
                let body = seq(op("test", vec![boolean(true)]), seq(c_stmt(s.clone()), c_bexp(b.clone())));
                F::iff(
                    c_stmt(op("while", vec![b.clone(), s])),
                    seq(c_bexp(b), seq(op("star", vec![body]), op("test", vec![boolean(false)]))),
                )
            }
            "NOCONFUSION" => {
                let (p1, q1, p2, q2) = (a.get("phi1"), a.get("psi1"), a.get("phi2"), a.get("psi2"));
                F::implies(
                    F::and(config(p1.clone(), q1.clone()), config(p2.clone(), q2.clone())),
                    config(F::and(p1, p2), F::and(q1, q2)),
                )
            }
            _ => unreachable!("slots() covers every axiom"),
        })
    }
}
