//! The SMC-machine case study.
//!
//! The signature turns the syntactic categories of a small imperative
//! language and the value stack, memory and control stack of the machine into
//! sorts, with one operator per grammar production and explicit injections.
//! [`theory`] holds the dynamic-logic axioms, [`machine`] a concrete
//! interpreter that serves as an independent oracle, [`imp`] the program
//! syntax and [`pprime`] the replay of P′.
//!
//! The program modality `[π]γ` is `dia^□(π, γ)` for the operator
//! `dia : CtrlStack Config -> Config`.

pub mod imp;
pub mod machine;
pub mod pprime;
pub mod theory;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::formula::Formula;
use crate::signature::{parse_sig, Signature, SignatureError, SymbolTable};

pub use imp::{encode_program, parse_program, print_program, print_stmt, ImpError};
pub use machine::{run_program, smc_run, Machine, RunError, DEFAULT_FUEL};
pub use pprime::{build_pprime_proof, pprime_entry, pprime_statement, PGM};
pub use theory::{SmcTheory, AXIOMS};

/// Numerals `n0 … n31` are the `Nat` constants.
pub const MAX_NUMERAL: u64 = 31;

/// Program variables declared by [`smc_signature`].
pub const DEFAULT_VARS: &[&str] = &["i", "j", "k", "m", "x", "y", "i1", "i2"];

const BASE_SIG: &str = "\
sort Nat
sort Var
sort Bool
sort AExp
sort BExp
sort Stmt
sort Val
sort ValStack
sort Mem
sort CtrlStack
sort Config
op true : -> Bool
op false : -> Bool
op nat2aexp : Nat -> AExp
op var2aexp : Var -> AExp
op plus_e : AExp AExp -> AExp
op leq_e : AExp AExp -> BExp
op assign : Var AExp -> Stmt
op ite : BExp Stmt Stmt -> Stmt
op while : BExp Stmt -> Stmt
op skip : -> Stmt
op seq_s : Stmt Stmt -> Stmt
op nat2val : Nat -> Val
op bool2val : Bool -> Val
op nil : -> ValStack
op cons : Val ValStack -> ValStack
op empty : -> Mem
op set : Mem Var Nat -> Mem
op get : Var Nat -> Mem
op c_aexp : AExp -> CtrlStack
op c_bexp : BExp -> CtrlStack
op c_stmt : Stmt -> CtrlStack
op asgn : Var -> CtrlStack
op plus : -> CtrlStack
op leq : -> CtrlStack
op test : Val -> CtrlStack
op seq : CtrlStack CtrlStack -> CtrlStack
op union : CtrlStack CtrlStack -> CtrlStack
op star : CtrlStack -> CtrlStack
op config : ValStack Mem -> Config
op dia : CtrlStack Config -> Config
prop vs : ValStack
prop mem : Mem
prop gamma : Config
prop pi : CtrlStack
svar memp : Mem
";

pub fn numeral_name(n: u64) -> String {
    format!("n{n}")
}

/// The value of a numeral constant `nK`.
pub fn numeral_value(f: &Formula) -> Option<u64> {
    let name = constant_of(f, "Nat")?;
    let n: u64 = name.strip_prefix('n')?.parse().ok()?;
    (n <= MAX_NUMERAL && numeral_name(n) == name).then_some(n)
}

/// The name of a program-variable constant.
pub fn var_name(f: &Formula) -> Option<&str> {
    constant_of(f, "Var")
}

fn constant_of<'a>(f: &'a Formula, sort: &str) -> Option<&'a str> {
    match f {
        Formula::App { op, sort: s, args } if args.is_empty() && s.name() == sort => Some(op),
        _ => None,
    }
}

/// The SMC signature with the [`DEFAULT_VARS`].
pub fn smc_signature() -> (Signature, SymbolTable) {
    smc_signature_with(&[]).expect("default variables are not reserved")
}

/// The SMC signature with the default variables and `extra` ones.
pub fn smc_signature_with(extra: &[&str]) -> Result<(Signature, SymbolTable), SignatureError> {
    let mut text = String::from(BASE_SIG);
    for n in 0..=MAX_NUMERAL {
        text.push_str(&format!("op {} : -> Nat\n", numeral_name(n)));
    }
    let vars: BTreeSet<&str> = DEFAULT_VARS.iter().chain(extra).copied().collect();
    for v in vars {
        text.push_str(&format!("op {v} : -> Var\n"));
    }
    parse_sig(&text)
}

/// Names a program variable may not take: keywords and the symbols of the
/// base signature.
pub fn is_reserved(name: &str) -> bool {
    const KEYWORDS: &[&str] = &["if", "then", "else", "while", "do", "skip", "true", "false"];
    if KEYWORDS.contains(&name) {
        return true;
    }
    if name.strip_prefix('n').is_some_and(|d| !d.is_empty() && d.chars().all(|c| c.is_ascii_digit())) {
        return true;
    }
    BASE_SIG.lines().any(|l| l.split_whitespace().nth(1) == Some(name))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Value {
    Nat(u64),
    Bool(bool),
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Nat(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

/// Finite memory; unset identifiers read as 0.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct Memory(BTreeMap<String, u64>);

impl Memory {
    pub fn new() -> Self {
        Memory::default()
    }

    pub fn get(&self, x: &str) -> u64 {
        self.0.get(x).copied().unwrap_or(0)
    }

    pub fn set(&mut self, x: &str, n: u64) {
        self.0.insert(x.to_string(), n);
    }

    pub fn with(mut self, x: &str, n: u64) -> Self {
        self.set(x, n);
        self
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    /// Reads `i=3,j=4`; whitespace around items is ignored.
    pub fn parse(text: &str) -> Result<Memory, String> {
        let mut m = Memory::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item.split_once('=').ok_or_else(|| format!("expected name=value, found '{item}'"))?;
            let v: u64 = v.trim().parse().map_err(|_| format!("'{}' is not a natural number", v.trim()))?;
            m.set(k.trim(), v);
        }
        Ok(m)
    }
}

impl fmt::Display for Memory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("empty");
        }
        let items: Vec<String> = self.iter().map(|(k, v)| format!("{k}={v}")).collect();
        f.write_str(&items.join(","))
    }
}

/// The value stack (top first) and memory of a machine configuration.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct ConcreteConfig {
    pub stack: Vec<Value>,
    pub memory: Memory,
}

impl ConcreteConfig {
    pub fn new(stack: Vec<Value>, memory: Memory) -> Self {
        ConcreteConfig { stack, memory }
    }
}

impl fmt::Display for ConcreteConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stack: ")?;
        for v in &self.stack {
            write!(f, "{v} · ")?;
        }
        write!(f, "nil  memory: {}", self.memory)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum AExp {
    Num(u64),
    Var(String),
    Plus(Box<AExp>, Box<AExp>),
}

/// `a1 <= a2`
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BExp(pub AExp, pub AExp);

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Stmt {
    Assign(String, AExp),
    If(BExp, Box<Stmt>, Box<Stmt>),
    While(BExp, Box<Stmt>),
    Skip,
    Seq(Box<Stmt>, Box<Stmt>),
}

/// Ground control-stack terms.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Ctrl {
    AExp(AExp),
    BExp(BExp),
    Stmt(Stmt),
    Asgn(String),
    Plus,
    Leq,
    Test(Value),
    Seq(Box<Ctrl>, Box<Ctrl>),
    Union(Box<Ctrl>, Box<Ctrl>),
    Star(Box<Ctrl>),
}

impl Ctrl {
    pub fn seq(a: Ctrl, b: Ctrl) -> Ctrl {
        Ctrl::Seq(Box::new(a), Box::new(b))
    }

    /// The test a branch starts with, if any.
    pub fn leading_test(&self) -> Option<Value> {
        match self {
            Ctrl::Test(v) => Some(*v),
            Ctrl::Seq(a, _) => a.leading_test(),
            _ => None,
        }
    }
}

impl AExp {
    fn vars(&self, out: &mut BTreeSet<String>) {
        match self {
            AExp::Num(_) => {}
            AExp::Var(x) => {
                out.insert(x.clone());
            }
            AExp::Plus(a, b) => {
                a.vars(out);
                b.vars(out);
            }
        }
    }
}

impl Stmt {
    pub fn seq(a: Stmt, b: Stmt) -> Stmt {
        Stmt::Seq(Box::new(a), Box::new(b))
    }

    /// Program variables read or written.
    pub fn vars(&self) -> BTreeSet<String> {
        fn go(s: &Stmt, out: &mut BTreeSet<String>) {
            match s {
                Stmt::Assign(x, a) => {
                    out.insert(x.clone());
                    a.vars(out);
                }
                Stmt::If(BExp(a, b), s1, s2) => {
                    a.vars(out);
                    b.vars(out);
                    go(s1, out);
                    go(s2, out);
                }
                Stmt::While(BExp(a, b), body) => {
                    a.vars(out);
                    b.vars(out);
                    go(body, out);
                }
                Stmt::Skip => {}
                Stmt::Seq(a, b) => {
                    go(a, out);
                    go(b, out);
                }
            }
        }
        let mut out = BTreeSet::new();
        go(self, &mut out);
        out
    }
}

impl fmt::Display for AExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AExp::Num(n) => write!(f, "{n}"),
            AExp::Var(x) => f.write_str(x),
            AExp::Plus(a, b) if matches!(**b, AExp::Plus(..)) => write!(f, "{a} + ({b})"),
            AExp::Plus(a, b) => write!(f, "{a} + {b}"),
        }
    }
}

impl fmt::Display for BExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.0, self.1)
    }
}

impl fmt::Display for Stmt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_stmt(self))
    }
}

impl fmt::Display for Ctrl {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ctrl::AExp(a) => write!(f, "c({a})"),
            Ctrl::BExp(b) => write!(f, "c({b})"),
            Ctrl::Stmt(s) => write!(f, "c({s})"),
            Ctrl::Asgn(x) => write!(f, "asgn({x})"),
            Ctrl::Plus => f.write_str("plus"),
            Ctrl::Leq => f.write_str("leq"),
            Ctrl::Test(v) => write!(f, "{v}?"),
            Ctrl::Seq(a, b) => write!(f, "{a} ; {b}"),
            Ctrl::Union(a, b) => write!(f, "({a} ∪ {b})"),
            Ctrl::Star(a) => write!(f, "({a})*"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("program variable '{0}' is not declared in the signature")]
    UnknownVar(String),
    #[error("numeral {0} exceeds the largest constant n{MAX_NUMERAL}")]
    NumeralRange(u64),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("not a ground {what} term: {formula}")]
pub struct DecodeError {
    pub what: &'static str,
    pub formula: String,
}

fn undecodable<T>(what: &'static str, f: &Formula) -> Result<T, DecodeError> {
    Err(DecodeError { what, formula: f.to_string() })
}

/// Builds ground SMC terms over a signature containing the SMC operators.
pub struct Encoder<'a> {
    sig: &'a Signature,
}

impl<'a> Encoder<'a> {
    pub fn new(sig: &'a Signature) -> Self {
        Encoder { sig }
    }

    /// `name(args)` for an operator of the base signature.
    pub fn app(&self, name: &str, args: Vec<Formula>) -> Formula {
        Formula::app(self.sig.op(name).unwrap_or_else(|| panic!("not an SMC signature: no '{name}'")), args)
    }

    pub fn numeral(&self, n: u64) -> Result<Formula, EncodeError> {
        if n > MAX_NUMERAL {
            return Err(EncodeError::NumeralRange(n));
        }
        Ok(self.app(&numeral_name(n), vec![]))
    }

    pub fn var(&self, x: &str) -> Result<Formula, EncodeError> {
        match self.sig.op(x) {
            Some(op) if op.args.is_empty() && op.result.name() == "Var" => Ok(Formula::app(op, vec![])),
            _ => Err(EncodeError::UnknownVar(x.to_string())),
        }
    }

    pub fn boolean(&self, b: bool) -> Formula {
        self.app(if b { "true" } else { "false" }, vec![])
    }

    pub fn value(&self, v: Value) -> Result<Formula, EncodeError> {
        Ok(match v {
            Value::Nat(n) => self.app("nat2val", vec![self.numeral(n)?]),
            Value::Bool(b) => self.app("bool2val", vec![self.boolean(b)]),
        })
    }

    /// `v1 · v2 · … · rest`
    pub fn stack_onto(&self, vals: &[Value], rest: Formula) -> Result<Formula, EncodeError> {
        vals.iter().rev().try_fold(rest, |acc, v| Ok(self.app("cons", vec![self.value(*v)?, acc])))
    }

    pub fn stack(&self, vals: &[Value]) -> Result<Formula, EncodeError> {
        self.stack_onto(vals, self.app("nil", vec![]))
    }

    /// `set(…set(empty, x1, n1)…, xk, nk)` in key order.
    pub fn memory(&self, m: &Memory) -> Result<Formula, EncodeError> {
        m.iter().try_fold(self.app("empty", vec![]), |acc, (x, n)| Ok(self.app("set", vec![acc, self.var(x)?, self.numeral(n)?])))
    }

    pub fn config(&self, c: &ConcreteConfig) -> Result<Formula, EncodeError> {
        Ok(self.app("config", vec![self.stack(&c.stack)?, self.memory(&c.memory)?]))
    }

    pub fn aexp(&self, a: &AExp) -> Result<Formula, EncodeError> {
        Ok(match a {
            AExp::Num(n) => self.app("nat2aexp", vec![self.numeral(*n)?]),
            AExp::Var(x) => self.app("var2aexp", vec![self.var(x)?]),
            AExp::Plus(a, b) => self.app("plus_e", vec![self.aexp(a)?, self.aexp(b)?]),
        })
    }

    pub fn bexp(&self, b: &BExp) -> Result<Formula, EncodeError> {
        Ok(self.app("leq_e", vec![self.aexp(&b.0)?, self.aexp(&b.1)?]))
    }

    pub fn stmt(&self, s: &Stmt) -> Result<Formula, EncodeError> {
        Ok(match s {
            Stmt::Assign(x, a) => self.app("assign", vec![self.var(x)?, self.aexp(a)?]),
            Stmt::If(b, s1, s2) => self.app("ite", vec![self.bexp(b)?, self.stmt(s1)?, self.stmt(s2)?]),
            Stmt::While(b, body) => self.app("while", vec![self.bexp(b)?, self.stmt(body)?]),
            Stmt::Skip => self.app("skip", vec![]),
            Stmt::Seq(a, b) => self.app("seq_s", vec![self.stmt(a)?, self.stmt(b)?]),
        })
    }

    pub fn ctrl(&self, c: &Ctrl) -> Result<Formula, EncodeError> {
        Ok(match c {
            Ctrl::AExp(a) => self.app("c_aexp", vec![self.aexp(a)?]),
            Ctrl::BExp(b) => self.app("c_bexp", vec![self.bexp(b)?]),
            Ctrl::Stmt(s) => self.app("c_stmt", vec![self.stmt(s)?]),
            Ctrl::Asgn(x) => self.app("asgn", vec![self.var(x)?]),
            Ctrl::Plus => self.app("plus", vec![]),
            Ctrl::Leq => self.app("leq", vec![]),
            Ctrl::Test(v) => self.app("test", vec![self.value(*v)?]),
            Ctrl::Seq(a, b) => self.app("seq", vec![self.ctrl(a)?, self.ctrl(b)?]),
            Ctrl::Union(a, b) => self.app("union", vec![self.ctrl(a)?, self.ctrl(b)?]),
            Ctrl::Star(a) => self.app("star", vec![self.ctrl(a)?]),
        })
    }
}

fn app_parts(f: &Formula) -> Option<(&str, &[Formula])> {
    match f {
        Formula::App { op, args, .. } => Some((op, args)),
        _ => None,
    }
}

pub fn decode_value(f: &Formula) -> Result<Value, DecodeError> {
    match app_parts(f) {
        Some(("nat2val", [n])) => numeral_value(n).map(Value::Nat).ok_or(()),
        Some(("bool2val", [b])) => match app_parts(b) {
            Some(("true", [])) => Ok(Value::Bool(true)),
            Some(("false", [])) => Ok(Value::Bool(false)),
            _ => Err(()),
        },
        _ => Err(()),
    }
    .or_else(|()| undecodable("Val", f))
}

pub fn decode_aexp(f: &Formula) -> Result<AExp, DecodeError> {
    match app_parts(f) {
        Some(("nat2aexp", [n])) => numeral_value(n).map(AExp::Num).map_or_else(|| undecodable("AExp", f), Ok),
        Some(("var2aexp", [x])) => var_name(x).map(|x| AExp::Var(x.into())).map_or_else(|| undecodable("AExp", f), Ok),
        Some(("plus_e", [a, b])) => Ok(AExp::Plus(Box::new(decode_aexp(a)?), Box::new(decode_aexp(b)?))),
        _ => undecodable("AExp", f),
    }
}

pub fn decode_bexp(f: &Formula) -> Result<BExp, DecodeError> {
    match app_parts(f) {
        Some(("leq_e", [a, b])) => Ok(BExp(decode_aexp(a)?, decode_aexp(b)?)),
        _ => undecodable("BExp", f),
    }
}

pub fn decode_stmt(f: &Formula) -> Result<Stmt, DecodeError> {
    let b = |f: &Formula| decode_stmt(f).map(Box::new);
    match app_parts(f) {
        Some(("assign", [x, a])) => match var_name(x) {
            Some(x) => Ok(Stmt::Assign(x.into(), decode_aexp(a)?)),
            None => undecodable("Stmt", f),
        },
        Some(("ite", [c, s1, s2])) => Ok(Stmt::If(decode_bexp(c)?, b(s1)?, b(s2)?)),
        Some(("while", [c, s])) => Ok(Stmt::While(decode_bexp(c)?, b(s)?)),
        Some(("skip", [])) => Ok(Stmt::Skip),
        Some(("seq_s", [s1, s2])) => Ok(Stmt::Seq(b(s1)?, b(s2)?)),
        _ => undecodable("Stmt", f),
    }
}

pub fn decode_ctrl(f: &Formula) -> Result<Ctrl, DecodeError> {
    let b = |f: &Formula| decode_ctrl(f).map(Box::new);
    match app_parts(f) {
        Some(("c_aexp", [a])) => Ok(Ctrl::AExp(decode_aexp(a)?)),
        Some(("c_bexp", [e])) => Ok(Ctrl::BExp(decode_bexp(e)?)),
        Some(("c_stmt", [s])) => Ok(Ctrl::Stmt(decode_stmt(s)?)),
        Some(("asgn", [x])) => var_name(x).map(|x| Ctrl::Asgn(x.into())).map_or_else(|| undecodable("CtrlStack", f), Ok),
        Some(("plus", [])) => Ok(Ctrl::Plus),
        Some(("leq", [])) => Ok(Ctrl::Leq),
        Some(("test", [v])) => Ok(Ctrl::Test(decode_value(v)?)),
        Some(("seq", [c1, c2])) => Ok(Ctrl::Seq(b(c1)?, b(c2)?)),
        Some(("union", [c1, c2])) => Ok(Ctrl::Union(b(c1)?, b(c2)?)),
        Some(("star", [c])) => Ok(Ctrl::Star(b(c)?)),
        _ => undecodable("CtrlStack", f),
    }
}

/// Reads a configuration pattern `config(S, M)` as a concrete configuration.
/// In `S`, the proposition `vs` stands for the stack of `base`; in `M`,
/// `mem` stands for its memory.
pub fn concretize(f: &Formula, base: &ConcreteConfig) -> Result<ConcreteConfig, DecodeError> {
    fn stack(f: &Formula, base: &[Value]) -> Result<Vec<Value>, DecodeError> {
        match f {
            Formula::Prop { name, .. } if &**name == "vs" => Ok(base.to_vec()),
            _ => match app_parts(f) {
                Some(("nil", [])) => Ok(vec![]),
                Some(("cons", [v, rest])) => {
                    let mut out = vec![decode_value(v)?];
                    out.extend(stack(rest, base)?);
                    Ok(out)
                }
                _ => undecodable("ValStack", f),
            },
        }
    }
    fn memory(f: &Formula, base: &Memory) -> Result<Memory, DecodeError> {
        match f {
            Formula::Prop { name, .. } if &**name == "mem" => Ok(base.clone()),
            _ => match app_parts(f) {
                Some(("empty", [])) => Ok(Memory::new()),
                Some(("set", [m, x, n])) => match (var_name(x), numeral_value(n)) {
                    (Some(x), Some(n)) => Ok(memory(m, base)?.with(x, n)),
                    _ => undecodable("Mem", f),
                },
                _ => undecodable("Mem", f),
            },
        }
    }
    match app_parts(f) {
        Some(("config", [s, m])) => Ok(ConcreteConfig::new(stack(s, &base.stack)?, memory(m, &base.memory)?)),
        _ => undecodable("Config", f),
    }
}
