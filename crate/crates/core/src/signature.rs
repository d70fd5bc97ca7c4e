//! Sorts, many-sorted operator signatures and symbol tables, plus the
//! line-oriented `.sig` file format.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

pub type Ident = Arc<str>;

/// A syntactic category. Formulas, worlds and symbols are stratified by sort.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Sort(pub Ident);

impl Sort {
    pub fn new(name: &str) -> Self {
        Sort(Arc::from(name))
    }

    pub fn name(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Sort {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Sort {
    fn from(s: &str) -> Self {
        Sort::new(s)
    }
}

/// An operator symbol `name : args -> result`. Zero-ary operators are allowed.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Operator {
    pub name: Ident,
    pub args: Vec<Sort>,
    pub result: Sort,
}

impl Operator {
    pub fn arity(&self) -> usize {
        self.args.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SignatureError {
    #[error("duplicate sort '{0}'")]
    DuplicateSort(String),
    #[error("unknown sort '{0}'")]
    UnknownSort(String),
    #[error("duplicate operator '{0}'")]
    DuplicateOperator(String),
    #[error("symbol '{0}' is already declared")]
    DuplicateSymbol(String),
    #[error("invalid identifier '{0}'")]
    BadIdent(String),
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
}

/// Characters that would make an identifier ambiguous in one of the text formats.
pub fn valid_ident(name: &str) -> bool {
    !name.is_empty()
        && !name.chars().any(|c| {
            c.is_whitespace()
                || matches!(c, '(' | ')' | '[' | ']' | '{' | '}' | ':' | ';' | '=' | '"' | '#' | ',')
        })
}

/// The many-sorted signature `(S, Σ)`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Signature {
    sorts: Vec<Sort>,
    ops: Vec<Operator>,
    op_index: HashMap<Ident, usize>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_sort(&mut self, name: &str) -> Result<Sort, SignatureError> {
        if !valid_ident(name) {
            return Err(SignatureError::BadIdent(name.to_string()));
        }
        let s = Sort::new(name);
        if self.sorts.contains(&s) {
            return Err(SignatureError::DuplicateSort(name.to_string()));
        }
        self.sorts.push(s.clone());
        Ok(s)
    }

    pub fn add_op(&mut self, name: &str, args: &[&str], result: &str) -> Result<(), SignatureError> {
        if !valid_ident(name) {
            return Err(SignatureError::BadIdent(name.to_string()));
        }
        if self.op_index.contains_key(name) {
            return Err(SignatureError::DuplicateOperator(name.to_string()));
        }
        let mut arg_sorts = Vec::with_capacity(args.len());
        for a in args {
            arg_sorts.push(self.require_sort(a)?);
        }
        let result = self.require_sort(result)?;
        let name: Ident = Arc::from(name);
        self.op_index.insert(name.clone(), self.ops.len());
        self.ops.push(Operator { name, args: arg_sorts, result });
        Ok(())
    }

    fn require_sort(&self, name: &str) -> Result<Sort, SignatureError> {
        self.sort(name).ok_or_else(|| SignatureError::UnknownSort(name.to_string()))
    }

    pub fn sort(&self, name: &str) -> Option<Sort> {
        self.sorts.iter().find(|s| s.name() == name).cloned()
    }

    pub fn has_sort(&self, s: &Sort) -> bool {
        self.sorts.contains(s)
    }

    pub fn sorts(&self) -> &[Sort] {
        &self.sorts
    }

    pub fn op(&self, name: &str) -> Option<&Operator> {
        self.op_index.get(name).map(|&i| &self.ops[i])
    }

    pub fn ops(&self) -> &[Operator] {
        &self.ops
    }

    /// Operators whose result sort is `s`.
    pub fn ops_with_result<'a>(&'a self, s: &'a Sort) -> impl Iterator<Item = &'a Operator> + 'a {
        self.ops.iter().filter(move |o| &o.result == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SymbolKind {
    Prop,
    Nominal,
    StateVar,
}

impl SymbolKind {
    pub fn keyword(self) -> &'static str {
        match self {
            SymbolKind::Prop => "prop",
            SymbolKind::Nominal => "nom",
            SymbolKind::StateVar => "svar",
        }
    }
}

/// Sorted propositional variables, nominals and state variables.
///
/// Every name is declared at most once across all three families and all
/// sorts, so a bare identifier resolves to exactly one symbol.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SymbolTable {
    entries: BTreeMap<Ident, (SymbolKind, Sort)>,
    order: Vec<Ident>,
}

impl SymbolTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn declare(&mut self, kind: SymbolKind, name: &str, sort: &Sort) -> Result<(), SignatureError> {
        if !valid_ident(name) {
            return Err(SignatureError::BadIdent(name.to_string()));
        }
        if self.entries.contains_key(name) {
            return Err(SignatureError::DuplicateSymbol(name.to_string()));
        }
        let id: Ident = Arc::from(name);
        self.entries.insert(id.clone(), (kind, sort.clone()));
        self.order.push(id);
        Ok(())
    }

    pub fn lookup(&self, name: &str) -> Option<(SymbolKind, &Sort)> {
        self.entries.get(name).map(|(k, s)| (*k, s))
    }

    /// Symbols of `kind` and `sort`, in declaration order.
    pub fn of(&self, kind: SymbolKind, sort: &Sort) -> Vec<Ident> {
        self.order
            .iter()
            .filter(|n| {
                let (k, s) = &self.entries[&***n];
                *k == kind && s == sort
            })
            .cloned()
            .collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Ident, SymbolKind, &Sort)> {
        self.order.iter().map(move |n| {
            let (k, s) = &self.entries[&**n];
            (n, *k, s)
        })
    }

    pub fn state_symbol(&self, name: &str) -> Option<StateSymbol> {
        match self.lookup(name)? {
            (SymbolKind::Nominal, s) => Some(StateSymbol::nominal(name, s.clone())),
            (SymbolKind::StateVar, s) => Some(StateSymbol::var(name, s.clone())),
            (SymbolKind::Prop, _) => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StateKind {
    Nominal,
    Var,
}

/// A nominal or a state variable.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateSymbol {
    pub kind: StateKind,
    pub name: Ident,
    pub sort: Sort,
}

impl StateSymbol {
    pub fn nominal(name: &str, sort: Sort) -> Self {
        Self { kind: StateKind::Nominal, name: Arc::from(name), sort }
    }

    pub fn var(name: &str, sort: Sort) -> Self {
        Self { kind: StateKind::Var, name: Arc::from(name), sort }
    }

    pub fn is_var(&self) -> bool {
        self.kind == StateKind::Var
    }
}

impl fmt::Display for StateSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Parses a `.sig` file into a signature and its symbol table.
pub fn parse_sig(text: &str) -> Result<(Signature, SymbolTable), SignatureError> {
    let mut sig = Signature::new();
    let mut tab = SymbolTable::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let line_no = lineno + 1;
        let syn = |msg: &str| SignatureError::Syntax { line: line_no, msg: msg.to_string() };
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "sort" => {
                if toks.len() != 2 {
                    return Err(syn("expected `sort <name>`"));
                }
                sig.add_sort(toks[1])?;
            }
            "op" => {
                // op <name> : s1 ... sn -> s
                if toks.len() < 5 || toks[2] != ":" || toks[toks.len() - 2] != "->" {
                    return Err(syn("expected `op <name> : <s1> ... <sn> -> <s>`"));
                }
                let args = &toks[3..toks.len() - 2];
                sig.add_op(toks[1], args, toks[toks.len() - 1])?;
            }
            kw @ ("prop" | "nom" | "svar") => {
                if toks.len() != 4 || toks[2] != ":" {
                    return Err(syn("expected `<kind> <name> : <sort>`"));
                }
                let sort = sig
                    .sort(toks[3])
                    .ok_or_else(|| SignatureError::UnknownSort(toks[3].to_string()))?;
                let kind = match kw {
                    "prop" => SymbolKind::Prop,
                    "nom" => SymbolKind::Nominal,
                    _ => SymbolKind::StateVar,
                };
                tab.declare(kind, toks[1], &sort)?;
            }
            other => return Err(syn(&format!("unknown directive '{other}'"))),
        }
    }
    Ok((sig, tab))
}

/// Renders a signature and symbol table in `.sig` syntax.
pub fn write_sig(sig: &Signature, tab: &SymbolTable) -> String {
    let mut out = String::new();
    for s in sig.sorts() {
        out.push_str(&format!("sort {s}\n"));
    }
    for op in sig.ops() {
        out.push_str(&format!("op {} :", op.name));
        for a in &op.args {
            out.push_str(&format!(" {a}"));
        }
        out.push_str(&format!(" -> {}\n", op.result));
    }
    for (name, kind, sort) in tab.iter() {
        out.push_str(&format!("{} {name} : {sort}\n", kind.keyword()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SIG: &str = "\
# two sorts
sort s
sort t
op f : s t -> s
op c : -> t
prop p : s
nom j : t
svar x : t
";

    #[test]
    fn parse_and_write_round_trip() {
        let (sig, tab) = parse_sig(SIG).unwrap();
        assert_eq!(sig.sorts().len(), 2);
        let f = sig.op("f").unwrap();
        assert_eq!(f.args, vec![Sort::new("s"), Sort::new("t")]);
        assert_eq!(sig.op("c").unwrap().arity(), 0);
        assert_eq!(tab.lookup("j"), Some((SymbolKind::Nominal, &Sort::new("t"))));
        let again = write_sig(&sig, &tab);
        let (sig2, tab2) = parse_sig(&again).unwrap();
        assert_eq!(sig, sig2);
        assert_eq!(tab, tab2);
    }

    #[test]
    fn rejects_undeclared_sort_and_duplicates() {
        assert_eq!(
            parse_sig("sort s\nop f : u -> s\n").unwrap_err(),
            SignatureError::UnknownSort("u".into())
        );
        assert!(matches!(parse_sig("sort s\nsort s\n"), Err(SignatureError::DuplicateSort(_))));
        assert!(matches!(
            parse_sig("sort s\nprop p : s\nnom p : s\n"),
            Err(SignatureError::DuplicateSymbol(_))
        ));
        assert!(matches!(
            parse_sig("sort s\nop f : -> s\nop f : s -> s\n"),
            Err(SignatureError::DuplicateOperator(_))
        ));
    }

    #[test]
    fn state_symbols_resolve_by_kind() {
        let (_, tab) = parse_sig(SIG).unwrap();
        assert!(tab.state_symbol("x").unwrap().is_var());
        assert!(!tab.state_symbol("j").unwrap().is_var());
        assert!(tab.state_symbol("p").is_none());
    }
}
