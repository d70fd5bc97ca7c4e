//! The line-oriented model file format.
//!
//! ```text
//! world <sort> <id>
//! rel <op> <w> <w1> ... <wn>
//! val <prop> <w>
//! nomval <nom> <w>
//! assign <svar> <w>
//! ```

use std::fmt::Write;

use super::{Assignment, Model};
use crate::signature::{Signature, StateSymbol, SymbolKind, SymbolTable};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("model line {line}: {msg}")]
pub struct MdlError {
    pub line: usize,
    pub msg: String,
}

pub fn parse_mdl(sig: &Signature, tab: &SymbolTable, text: &str) -> Result<(Model, Assignment), MdlError> {
    let mut m = Model::empty(sig);
    let mut g = Assignment::new();
    let mut nom_seen = std::collections::BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let err = |msg: String| MdlError { line, msg };
        let content = raw.split('#').next().unwrap_or("");
        let words: Vec<&str> = content.split_whitespace().collect();
        let Some((&head, rest)) = words.split_first() else { continue };
        let world = |m: &Model, sort: &crate::signature::Sort, id: &str| {
            m.find_world(sort, id).ok_or_else(|| err(format!("no world '{id}' of sort {sort}")))
        };
        match head {
            "world" => {
                let [sort, id] = rest else { return Err(err("expected: world <sort> <id>".into())) };
                let s = sig.sort(sort).ok_or_else(|| err(format!("unknown sort '{sort}'")))?;
                if m.find_world(&s, id).is_some() {
                    return Err(err(format!("duplicate world '{id}' of sort {s}")));
                }
                m.add_world(&s, id);
            }
            "rel" => {
                let Some((op, ws)) = rest.split_first() else { return Err(err("expected: rel <op> <w> ...".into())) };
                let decl = sig.op(op).ok_or_else(|| err(format!("unknown operator '{op}'")))?;
                if ws.len() != decl.arity() + 1 {
                    return Err(err(format!("'{op}' needs {} worlds, found {}", decl.arity() + 1, ws.len())));
                }
                let w = world(&m, &decl.result, ws[0])?;
                let mut args = Vec::with_capacity(decl.arity());
                for (s, id) in decl.args.iter().zip(&ws[1..]) {
                    args.push(world(&m, s, id)?);
                }
                m.add_tuple(op, w, args).map_err(|e| err(e.to_string()))?;
            }
            "val" | "nomval" | "assign" => {
                let [name, id] = rest else { return Err(err(format!("expected: {head} <name> <world>"))) };
                let want = match head {
                    "val" => SymbolKind::Prop,
                    "nomval" => SymbolKind::Nominal,
                    _ => SymbolKind::StateVar,
                };
                let sort = match tab.lookup(name) {
                    Some((k, s)) if k == want => s.clone(),
                    _ => return Err(err(format!("'{name}' is not a declared {}", want.keyword()))),
                };
                let w = world(&m, &sort, id)?;
                match want {
                    SymbolKind::Prop => m.set_prop(name, &sort, w, true),
                    SymbolKind::Nominal => {
                        if !nom_seen.insert(name.to_string()) {
                            return Err(err(format!("nominal '{name}' valued twice")));
                        }
                        m.set_nom(name, &sort, w)
                    }
                    SymbolKind::StateVar => g.set(&StateSymbol::var(name, sort), w),
                }
            }
            other => return Err(err(format!("unknown directive '{other}'"))),
        }
    }
    // props declared after worlds were added may have short bit vectors
    let props: Vec<_> = m.props().map(|(n, s)| (n.clone(), s.clone())).collect();
    for (n, s) in props {
        let ext = m.prop_extension(&n);
        for w in 0..m.size(&s) {
            m.set_prop(&n, &s, w, ext.contains(&w));
        }
    }
    m.validate(sig, tab).map_err(|e| MdlError { line: text.lines().count(), msg: e.to_string() })?;
    Ok((m, g))
}

pub fn write_mdl(m: &Model, g: &Assignment) -> String {
    let mut out = String::new();
    for s in m.sorts() {
        for id in m.world_ids(s) {
            let _ = writeln!(out, "world {s} {id}");
        }
    }
    for (op, r) in m.relations() {
        for (w, args) in r.tuples() {
            let _ = write!(out, "rel {op} {}", m.world_id(&r.sorts[0], w).unwrap_or("?"));
            for (s, a) in r.sorts[1..].iter().zip(args) {
                let _ = write!(out, " {}", m.world_id(s, *a).unwrap_or("?"));
            }
            out.push('\n');
        }
    }
    for (p, s) in m.props() {
        for w in m.prop_extension(p) {
            let _ = writeln!(out, "val {p} {}", m.world_id(s, w).unwrap_or("?"));
        }
    }
    for (j, s, w) in m.noms() {
        let _ = writeln!(out, "nomval {j} {}", m.world_id(s, w).unwrap_or("?"));
    }
    for (x, s, w) in g.iter() {
        let _ = writeln!(out, "assign {x} {}", m.world_id(s, w).unwrap_or("?"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::parse_sig;

    const SIG: &str = "sort s\nsort t\nop f : s t -> s\nprop p : s\nnom j : t\nsvar x : s\n";
    const MDL: &str = "# two sorts\nworld s a\nworld s b\nworld t u\nrel f a b u\nval p b\nnomval j u\nassign x a\n";

    #[test]
    fn round_trip() {
        let (sig, tab) = parse_sig(SIG).unwrap();
        let (m, g) = parse_mdl(&sig, &tab, MDL).unwrap();
        assert_eq!(m.size(&"s".into()), 2);
        assert!(m.relation("f").unwrap().contains(0, &[1, 0]));
        assert_eq!(g.get("x"), Some(0));
        let text = write_mdl(&m, &g);
        let (m2, g2) = parse_mdl(&sig, &tab, &text).unwrap();
        assert_eq!(m, m2);
        assert_eq!(g, g2);
    }

    #[test]
    fn rejects_bad_input() {
        let (sig, tab) = parse_sig(SIG).unwrap();
        for (bad, line) in [
            ("world s a\nworld t u\nrel f a u\nnomval j u\n", 3),
            ("world s a\nworld t u\nval j a\n", 3),
            ("world s a\nworld t u\nnomval j u\nnomval j u\n", 4),
            ("world s a\nworld t u\nval p zz\n", 3),
        ] {
            assert_eq!(parse_mdl(&sig, &tab, bad).unwrap_err().line, line, "{bad}");
        }
        // a sort without worlds
        assert!(parse_mdl(&sig, &tab, "world s a\nnomval j a\n").is_err());
        // nominal left undenoted
        assert!(parse_mdl(&sig, &tab, "world s a\nworld t u\n").is_err());
    }
}
