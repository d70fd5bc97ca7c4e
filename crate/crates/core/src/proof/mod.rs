//! Hilbert-style proof checking for the four hybrid systems.

pub mod builder;
pub mod library;
mod prf;
pub mod scheme;
pub mod taut;

use std::collections::BTreeMap;
use std::fmt;

use crate::formula::Formula;
use crate::signature::{Ident, Signature, Sort, StateSymbol, SymbolTable};
use crate::sortcheck::{self, SortError};

pub use prf::{parse_prf, write_just, write_prf, PrfError};
pub use scheme::{instantiate, Binding, Bindings, SchemeError, SchemeId, SchemeInstance};

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SystemId {
    K_SIGMA,
    H_AT,
    H_FORALL,
    H_AT_FORALL,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rule {
    Mp,
    Ug,
    Gen,
    GenAt,
    Broadcast,
    Paste0,
    Paste1,
}

impl SystemId {
    pub const ALL: [SystemId; 4] = [SystemId::K_SIGMA, SystemId::H_AT, SystemId::H_FORALL, SystemId::H_AT_FORALL];

    pub fn name(self) -> &'static str {
        match self {
            SystemId::K_SIGMA => "K_SIGMA",
            SystemId::H_AT => "H_AT",
            SystemId::H_FORALL => "H_FORALL",
            SystemId::H_AT_FORALL => "H_AT_FORALL",
        }
    }

    pub fn parse(name: &str) -> Option<SystemId> {
        SystemId::ALL.into_iter().find(|s| s.name() == name)
    }

    pub fn schemes(self) -> &'static [SchemeId] {
        use SchemeId::*;
        match self {
            SystemId::K_SIGMA => &[TAUT, K_SIGMA_AX, DUAL],
            SystemId::H_AT => &[TAUT, K_SIGMA_AX, DUAL, K_AT, SELFDUAL, INTRO, AGREE, REF, BACK],
            SystemId::H_FORALL => &[TAUT, K_SIGMA_AX, DUAL, Q1, Q2, NAME, BARCAN, NOM],
            SystemId::H_AT_FORALL => &[
                TAUT, K_SIGMA_AX, DUAL, K_AT, SELFDUAL, INTRO, AGREE, REF, BACK, Q1, Q2, NAME, BARCAN, BARCAN_AT, NOM_X,
            ],
        }
    }

    pub fn allows_rule(self, r: Rule) -> bool {
        match r {
            Rule::Mp | Rule::Ug => true,
            Rule::Gen => matches!(self, SystemId::H_FORALL | SystemId::H_AT_FORALL),
            Rule::GenAt | Rule::Broadcast | Rule::Paste0 | Rule::Paste1 => {
                matches!(self, SystemId::H_AT | SystemId::H_AT_FORALL)
            }
        }
    }

    fn allows_at(self) -> bool {
        matches!(self, SystemId::H_AT | SystemId::H_AT_FORALL)
    }

    fn allows_forall(self) -> bool {
        matches!(self, SystemId::H_FORALL | SystemId::H_AT_FORALL)
    }

    /// Whether `f` belongs to the language of the system.
    pub fn admits(self, f: &Formula) -> Result<(), &'static str> {
        let mut bad = None;
        f.visit(&mut |g| {
            if bad.is_some() {
                return;
            }
            bad = match g {
                Formula::Nom { .. } | Formula::SVar { .. } if self == SystemId::K_SIGMA => {
                    Some("nominals and state variables")
                }
                Formula::At { .. } if !self.allows_at() => Some("satisfaction operators"),
                Formula::Forall { .. } if !self.allows_forall() => Some("binders"),
                _ => None,
            }
        });
        bad.map_or(Ok(()), Err)
    }
}

impl fmt::Display for SystemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub type Params = BTreeMap<String, Formula>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TheoryError {
    #[error("unknown theory axiom '{0}'")]
    Unknown(String),
    #[error("missing parameter '{0}'")]
    MissingParam(String),
    #[error("unexpected parameter '{0}'")]
    UnexpectedParam(String),
    #[error("parameter '{name}' must have sort {expected}")]
    ParamSort { name: String, expected: Sort },
    #[error("side condition fails: {0}")]
    SideCondition(String),
    #[error(transparent)]
    Sort(#[from] SortError),
}

/// A set of non-logical axioms, possibly parameterized.
pub trait Theory: Send + Sync {
    fn name(&self) -> &str;
    fn axiom_names(&self) -> Vec<&'static str>;
    fn axiom(&self, name: &str, params: &Params) -> Result<Formula, TheoryError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    Hyp(String),
    Axiom(SchemeInstance),
    TheoryAxiom { name: String, params: Params },
    /// Line `i` is `φ`, line `j` is `φ → this`.
    Mp(usize, usize),
    /// This line is `σ^□` of `sides` with line `premise` at the 1-based `pos`.
    Ug { op: Ident, pos: usize, premise: usize, sides: Vec<Formula> },
    Gen { var: StateSymbol, premise: usize },
    GenAt { sym: StateSymbol, premise: usize },
    Broadcast { sort: Sort, premise: usize },
    Paste0 { y: StateSymbol, premise: usize },
    Paste1 { y: StateSymbol, premise: usize },
}

impl Justification {
    pub fn premises(&self) -> Vec<usize> {
        match self {
            Justification::Hyp(_) | Justification::Axiom(_) | Justification::TheoryAxiom { .. } => vec![],
            Justification::Mp(i, j) => vec![*i, *j],
            Justification::Ug { premise, .. }
            | Justification::Gen { premise, .. }
            | Justification::GenAt { premise, .. }
            | Justification::Broadcast { premise, .. }
            | Justification::Paste0 { premise, .. }
            | Justification::Paste1 { premise, .. } => vec![*premise],
        }
    }

    fn rule(&self) -> Option<Rule> {
        Some(match self {
            Justification::Mp(..) => Rule::Mp,
            Justification::Ug { .. } => Rule::Ug,
            Justification::Gen { .. } => Rule::Gen,
            Justification::GenAt { .. } => Rule::GenAt,
            Justification::Broadcast { .. } => Rule::Broadcast,
            Justification::Paste0 { .. } => Rule::Paste0,
            Justification::Paste1 { .. } => Rule::Paste1,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofLine {
    pub index: usize,
    pub sort: Sort,
    pub formula: Formula,
    pub just: Justification,
    pub note: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[allow(non_camel_case_types)]
pub enum Reason {
    INDEX,
    SORT,
    FRAGMENT,
    BAD_REFERENCE,
    HYP_UNKNOWN,
    HYP_MISMATCH,
    SCHEME_NOT_IN_SYSTEM,
    RULE_NOT_IN_SYSTEM,
    BAD_INSTANCE,
    SIDE_CONDITION,
    INSTANCE_MISMATCH,
    NO_THEORY,
    THEORY_AXIOM,
    THEORY_MISMATCH,
    MP_SHAPE,
    UG_SHAPE,
    GEN_SHAPE,
    GENAT_SHAPE,
    BCAST_SHAPE,
    PASTE_SHAPE,
    FRESHNESS,
    HYP_DEPENDENT,
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub line: usize,
    pub reason: Reason,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}: {}", self.line, self.reason, self.detail)
    }
}

/// Per-line outcome of a successful check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checked {
    /// `(index, depends on a hypothesis)` for every line, in order.
    pub lines: Vec<(usize, bool)>,
}

pub struct Checker<'a> {
    pub sig: &'a Signature,
    pub tab: &'a SymbolTable,
    pub system: SystemId,
    pub theory: Option<&'a dyn Theory>,
    pub hyps: &'a [(String, Formula)],
}

fn fail<T>(line: usize, reason: Reason, detail: impl Into<String>) -> Result<T, Failure> {
    Err(Failure { line, reason, detail: detail.into() })
}

impl<'a> Checker<'a> {
    pub fn new(sig: &'a Signature, tab: &'a SymbolTable, system: SystemId) -> Self {
        Checker { sig, tab, system, theory: None, hyps: &[] }
    }

    pub fn with_theory(mut self, theory: &'a dyn Theory) -> Self {
        self.theory = Some(theory);
        self
    }

    pub fn with_hyps(mut self, hyps: &'a [(String, Formula)]) -> Self {
        self.hyps = hyps;
        self
    }

    /// Validates every line in order and stops at the first failure.
    pub fn check(&self, proof: &[ProofLine]) -> Result<Checked, Failure> {
        let mut seen: BTreeMap<usize, (&Formula, bool)> = BTreeMap::new();
        let mut out = Vec::with_capacity(proof.len());
        let mut last: Option<usize> = None;
        for line in proof {
            let n = line.index;
            if last.is_some_and(|l| n <= l) {
                return fail(n, Reason::INDEX, "line indices must increase");
            }
            last = Some(n);
            if let Err(e) = sortcheck::well_sorted(self.sig, self.tab, &line.formula, &line.sort) {
                return fail(n, Reason::SORT, e.to_string());
            }
            if let Err(what) = self.system.admits(&line.formula) {
                return fail(n, Reason::FRAGMENT, format!("{} has no {what}", self.system));
            }
            let flag = self.check_line(line, &seen)?;
            seen.insert(n, (&line.formula, flag));
            out.push((n, flag));
        }
        Ok(Checked { lines: out })
    }

    fn premise<'s>(
        &self,
        line: usize,
        i: usize,
        seen: &'s BTreeMap<usize, (&'a Formula, bool)>,
    ) -> Result<(&'s Formula, bool), Failure> {
        match seen.get(&i) {
            Some((f, flag)) => Ok((f, *flag)),
            None => fail(line, Reason::BAD_REFERENCE, format!("no earlier line {i}")),
        }
    }

    /// Returns the hypothesis flag of the line.
    fn check_line(&self, line: &ProofLine, seen: &BTreeMap<usize, (&'a Formula, bool)>) -> Result<bool, Failure> {
        let n = line.index;
        let this = &line.formula;
        if let Some(rule) = line.just.rule() {
            if !self.system.allows_rule(rule) {
                return fail(n, Reason::RULE_NOT_IN_SYSTEM, format!("{rule:?} is not a rule of {}", self.system));
            }
        }
        // generalization-type rules need a hypothesis-free premise
        let general = |p: usize| -> Result<&Formula, Failure> {
            let (f, flag) = self.premise(n, p, seen)?;
            if flag {
                return fail(n, Reason::HYP_DEPENDENT, format!("line {p} depends on a hypothesis"));
            }
            Ok(f)
        };
        match &line.just {
            Justification::Hyp(name) => match self.hyps.iter().find(|(h, _)| h == name) {
                None => fail(n, Reason::HYP_UNKNOWN, format!("no hypothesis '{name}'")),
                Some((_, f)) if f != this => fail(n, Reason::HYP_MISMATCH, format!("line differs from '{name}'")),
                Some(_) => Ok(true),
            },
            Justification::Axiom(inst) => {
                if !self.system.schemes().contains(&inst.scheme) {
                    return fail(
                        n,
                        Reason::SCHEME_NOT_IN_SYSTEM,
                        format!("{} is not an axiom scheme of {}", inst.scheme, self.system),
                    );
                }
                let mut inst = inst.clone();
                if inst.scheme == SchemeId::TAUT && inst.bindings.is_empty() {
                    inst.bindings.insert("phi".into(), Binding::Formula(this.clone()));
                }
                match inst.instantiate(self.sig, self.tab) {
                    Err(SchemeError::SideCondition { scheme, detail }) => {
                        fail(n, Reason::SIDE_CONDITION, format!("{scheme}: {detail}"))
                    }
                    Err(e) => fail(n, Reason::BAD_INSTANCE, e.to_string()),
                    Ok(f) if &f != this => {
                        fail(n, Reason::INSTANCE_MISMATCH, format!("{} instance is {f}", inst.scheme))
                    }
                    Ok(_) => Ok(false),
                }
            }
            Justification::TheoryAxiom { name, params } => {
                let Some(th) = self.theory else {
                    return fail(n, Reason::NO_THEORY, format!("'{name}' needs a theory"));
                };
                match th.axiom(name, params) {
                    Err(e) => fail(n, Reason::THEORY_AXIOM, e.to_string()),
                    Ok(f) if &f != this => fail(n, Reason::THEORY_MISMATCH, format!("{name} instance is {f}")),
                    Ok(_) => Ok(false),
                }
            }
            Justification::Mp(i, j) => {
                let (a, fa) = self.premise(n, *i, seen)?;
                let (b, fb) = self.premise(n, *j, seen)?;
                match b.as_implies() {
                    Some((l, r)) if l == a && r == this => Ok(fa || fb),
                    _ => fail(n, Reason::MP_SHAPE, format!("line {j} is not line {i} -> this line")),
                }
            }
            Justification::Ug { op, pos, premise, sides } => {
                let p = general(*premise)?;
                let Some(decl) = self.sig.op(op) else {
                    return fail(n, Reason::UG_SHAPE, format!("unknown operator '{op}'"));
                };
                if *pos == 0 || *pos > decl.arity() || sides.len() + 1 != decl.arity() {
                    return fail(n, Reason::UG_SHAPE, "position or side count does not fit the operator");
                }
                let expect = Formula::boxed(decl, scheme::splice(sides, pos - 1, p.clone()));
                if &expect != this {
                    return fail(n, Reason::UG_SHAPE, format!("expected {expect}"));
                }
                Ok(false)
            }
            Justification::Gen { var, premise } => {
                let p = general(*premise)?;
                if !var.is_var() || &Formula::forall(var.clone(), p.clone()) != this {
                    return fail(n, Reason::GEN_SHAPE, format!("this line is not (forall {} <line {premise}>)", var.name));
                }
                Ok(false)
            }
            Justification::GenAt { sym, premise } => {
                let p = general(*premise)?;
                if &Formula::at(sym.clone(), line.sort.clone(), p.clone()) != this {
                    return fail(n, Reason::GENAT_SHAPE, format!("this line is not (@ {} {} <line {premise}>)", sym.name, line.sort));
                }
                Ok(false)
            }
            Justification::Broadcast { sort, premise } => {
                let p = general(*premise)?;
                let ok = match (p, this) {
                    (Formula::At { sym: z1, body: b1, .. }, Formula::At { sym: z2, sort: s2, body: b2 }) => {
                        z1 == z2 && b1 == b2 && s2 == sort
                    }
                    _ => false,
                };
                if !ok {
                    return fail(n, Reason::BCAST_SHAPE, format!("line {premise} and this line differ beyond the result sort"));
                }
                Ok(false)
            }
            Justification::Paste0 { y, premise } => {
                let p = general(*premise)?;
                let Some((Formula::At { sym: z, sort, body: phi }, psi)) = this.as_implies() else {
                    return fail(n, Reason::PASTE_SHAPE, "this line is not @_z phi -> psi");
                };
                let expect = Formula::implies(
                    Formula::at(z.clone(), sort.clone(), Formula::and(Formula::state(y), (**phi).clone())),
                    psi.clone(),
                );
                if &expect != p {
                    return fail(n, Reason::PASTE_SHAPE, format!("line {premise} should be {expect}"));
                }
                if y == z || phi.occurs(y) || psi.occurs(y) {
                    return fail(n, Reason::FRESHNESS, format!("'{}' is not fresh", y.name));
                }
                Ok(false)
            }
            Justification::Paste1 { y, premise } => {
                let p = general(*premise)?;
                let shape = this.as_implies().and_then(|(l, psi)| match l {
                    Formula::At { sym, sort, body } => match &**body {
                        Formula::App { op, args, .. } => Some((sym, sort, op, args, psi)),
                        _ => None,
                    },
                    _ => None,
                });
                let Some((z, sort, op, args, psi)) = shape else {
                    return fail(n, Reason::PASTE_SHAPE, "this line is not @_z sigma(...) -> psi");
                };
                let decl = self.sig.op(op).expect("sort-checked");
                let matches = (0..args.len()).any(|i| {
                    let mut pasted = args.clone();
                    pasted[i] = Formula::and(Formula::state(y), pasted[i].clone());
                    let expect =
                        Formula::implies(Formula::at(z.clone(), sort.clone(), Formula::app(decl, pasted)), psi.clone());
                    &expect == p
                });
                if !matches {
                    return fail(n, Reason::PASTE_SHAPE, format!("line {premise} is not a pasted form of this line"));
                }
                // y must be fresh for every argument, not only the pasted one
                if y == z || args.iter().any(|a| a.occurs(y)) || psi.occurs(y) {
                    return fail(n, Reason::FRESHNESS, format!("'{}' is not fresh", y.name));
                }
                Ok(false)
            }
        }
    }
}

/// Convenience wrapper over [`Checker`].
pub fn check_proof(
    sig: &Signature,
    tab: &SymbolTable,
    system: SystemId,
    theory: Option<&dyn Theory>,
    hyps: &[(String, Formula)],
    proof: &[ProofLine],
) -> Result<Checked, Failure> {
    Checker { sig, tab, system, theory, hyps }.check(proof)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_sig;
    use crate::syntax::parse_formula;

    fn setup() -> (Signature, SymbolTable) {
        parse_sig("sort s\nsort t\nop f : s -> s\nop g : s t -> s\nprop p : s\nprop q : s\nprop r : t\nnom j : t\nnom k : t\nsvar x : t\n")
            .unwrap()
    }

    fn line(sig: &Signature, tab: &SymbolTable, index: usize, sort: &str, f: &str, just: Justification) -> ProofLine {
        ProofLine { index, sort: sort.into(), formula: parse_formula(sig, tab, f).unwrap(), just, note: None }
    }

    fn taut() -> Justification {
        Justification::Axiom(SchemeInstance::new(SchemeId::TAUT))
    }

    #[test]
    fn modus_ponens() {
        let (sig, tab) = setup();
        let proof = vec![
            line(&sig, &tab, 1, "s", "(or p (not p))", taut()),
            line(&sig, &tab, 2, "s", "(-> (or p (not p)) (or q (not q)))", taut()),
            line(&sig, &tab, 3, "s", "(or q (not q))", Justification::Mp(1, 2)),
        ];
        assert!(check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &proof).is_ok());
        let mut bad = proof.clone();
        bad[2].just = Justification::Mp(2, 1);
        let e = check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &bad).unwrap_err();
        assert_eq!((e.line, e.reason), (3, Reason::MP_SHAPE));
    }

    #[test]
    fn ug_and_hypotheses() {
        let (sig, tab) = setup();
        let hyps = vec![("h1".to_string(), parse_formula(&sig, &tab, "p").unwrap())];
        let ug = Justification::Ug { op: "f".into(), pos: 1, premise: 1, sides: vec![] };
        let from_taut = vec![
            line(&sig, &tab, 1, "s", "(or p (not p))", taut()),
            line(&sig, &tab, 2, "s", "(box f (or p (not p)))", ug.clone()),
        ];
        assert!(check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &from_taut).is_ok());
        let from_hyp = vec![
            line(&sig, &tab, 1, "s", "p", Justification::Hyp("h1".into())),
            line(&sig, &tab, 2, "s", "(box f p)", ug),
        ];
        let e = check_proof(&sig, &tab, SystemId::K_SIGMA, None, &hyps, &from_hyp).unwrap_err();
        assert_eq!((e.line, e.reason), (2, Reason::HYP_DEPENDENT));
    }

    #[test]
    fn system_restrictions() {
        let (sig, tab) = setup();
        let refl = Justification::Axiom(
            SchemeInstance::new(SchemeId::REF).state("z", tab.state_symbol("j").unwrap()).sort("s", "s".into()),
        );
        let proof = vec![line(&sig, &tab, 1, "s", "(@ j s j)", refl)];
        assert!(check_proof(&sig, &tab, SystemId::H_AT, None, &[], &proof).is_ok());
        let e = check_proof(&sig, &tab, SystemId::H_FORALL, None, &[], &proof).unwrap_err();
        assert_eq!(e.reason, Reason::FRAGMENT);
        let e = check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &proof).unwrap_err();
        assert_eq!(e.reason, Reason::FRAGMENT);
    }

    #[test]
    fn paste0_freshness() {
        let (sig, tab) = setup();
        let k = tab.state_symbol("k").unwrap();
        let paste = Justification::Paste0 { y: k, premise: 1 };
        let fresh = vec![
            line(&sig, &tab, 1, "s", "(-> (@ j s (and k r)) (or (@ j s r) (not (@ j s r))))", taut()),
            line(&sig, &tab, 2, "s", "(-> (@ j s r) (or (@ j s r) (not (@ j s r))))", paste.clone()),
        ];
        assert!(check_proof(&sig, &tab, SystemId::H_AT, None, &[], &fresh).is_ok());
        let stale = vec![
            line(&sig, &tab, 1, "s", "(-> (@ j s (and k r)) (or (@ j s k) (not (@ j s k))))", taut()),
            line(&sig, &tab, 2, "s", "(-> (@ j s r) (or (@ j s k) (not (@ j s k))))", paste),
        ];
        let e = check_proof(&sig, &tab, SystemId::H_AT, None, &[], &stale).unwrap_err();
        assert_eq!((e.line, e.reason), (2, Reason::FRESHNESS));
        let not_taut = vec![line(&sig, &tab, 1, "s", "(-> (@ j s r) (@ j s k))", taut())];
        let e = check_proof(&sig, &tab, SystemId::H_AT, None, &[], &not_taut).unwrap_err();
        assert_eq!(e.reason, Reason::SIDE_CONDITION);
    }

    #[test]
    fn indices_must_increase_and_references_exist() {
        let (sig, tab) = setup();
        let proof = vec![
            line(&sig, &tab, 2, "s", "(or p (not p))", taut()),
            line(&sig, &tab, 1, "s", "(or p (not p))", taut()),
        ];
        assert_eq!(check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &proof).unwrap_err().reason, Reason::INDEX);
        let proof = vec![line(&sig, &tab, 1, "s", "(or q (not q))", Justification::Mp(4, 5))];
        assert_eq!(
            check_proof(&sig, &tab, SystemId::K_SIGMA, None, &[], &proof).unwrap_err().reason,
            Reason::BAD_REFERENCE
        );
    }
}
