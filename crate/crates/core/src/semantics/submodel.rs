//! Generated submodels.

use std::collections::{BTreeMap, BTreeSet};

use super::{Assignment, Model, World};
use crate::signature::{Sort, StateSymbol};

#[derive(Debug, Clone)]
pub struct Submodel {
    pub model: Model,
    /// `g` with every variable moved into the submodel (outside values go to
    /// the padding world of their sort).
    pub assignment: Assignment,
    /// Original world to submodel world, per sort.
    pub embed: BTreeMap<Sort, BTreeMap<World, World>>,
    /// The fresh isolated world added to a sort, if any.
    pub padding: BTreeMap<Sort, World>,
}

impl Submodel {
    pub fn contains(&self, sort: &Sort, w: World) -> bool {
        self.embed.get(sort).is_some_and(|e| e.contains_key(&w))
    }
}

/// Smallest set containing `x` and closed under `R_σ` successors, with
/// relations and valuations restricted. A sort gets one fresh isolated world
/// when it would otherwise be empty or when a nominal or an assigned variable
/// of that sort points outside the generated set.
pub fn generated_submodel(m: &Model, x: &BTreeMap<Sort, BTreeSet<World>>, g: &Assignment) -> Submodel {
    let mut keep: BTreeMap<Sort, BTreeSet<World>> = m.sorts().map(|s| (s.clone(), BTreeSet::new())).collect();
    let mut todo: Vec<(Sort, World)> = Vec::new();
    for (s, ws) in x {
        for w in ws {
            if keep.entry(s.clone()).or_default().insert(*w) {
                todo.push((s.clone(), *w));
            }
        }
    }
    while let Some((s, w)) = todo.pop() {
        for (_, r) in m.relations() {
            if r.sorts[0] != s {
                continue;
            }
            for t in r.from(w) {
                for (si, wi) in r.sorts[1..].iter().zip(t) {
                    if keep.entry(si.clone()).or_default().insert(*wi) {
                        todo.push((si.clone(), *wi));
                    }
                }
            }
        }
    }

    let mut needs_pad: BTreeSet<Sort> = keep.iter().filter(|(_, ws)| ws.is_empty()).map(|(s, _)| s.clone()).collect();
    for (_, s, w) in m.noms() {
        if !keep[s].contains(&w) {
            needs_pad.insert(s.clone());
        }
    }
    for (_, s, w) in g.iter() {
        if !keep.get(s).is_some_and(|k| k.contains(&w)) {
            needs_pad.insert(s.clone());
        }
    }

    let mut out = m.clone();
    out.worlds.values_mut().for_each(Vec::clear);
    out.rels.values_mut().for_each(|r| r.succ.clear());
    out.props.clear();
    out.noms.clear();

    let mut embed: BTreeMap<Sort, BTreeMap<World, World>> = BTreeMap::new();
    let mut padding = BTreeMap::new();
    for (s, ws) in &keep {
        let e = embed.entry(s.clone()).or_default();
        for w in ws {
            let id = m.world_id(s, *w).expect("world of m");
            e.insert(*w, out.add_world(s, id));
        }
        if needs_pad.contains(s) {
            let mut id = String::from("_pad");
            while m.find_world(s, &id).is_some() {
                id.insert(0, '_');
            }
            padding.insert(s.clone(), out.add_world(s, &id));
        }
    }
    for (op, r) in m.relations() {
        let src = &r.sorts[0];
        for (w, t) in r.tuples() {
            if let Some(nw) = embed[src].get(&w) {
                let args = r.sorts[1..].iter().zip(t).map(|(si, wi)| embed[si][wi]).collect();
                out.add_tuple(op, *nw, args).expect("same operators");
            }
        }
    }
    for (p, s) in m.props() {
        for w in m.prop_extension(p) {
            if let Some(nw) = embed[s].get(&w) {
                out.set_prop(p, s, *nw, true);
            }
        }
        // keep the proposition known even if its extension vanished
        if let Some(w0) = (0..out.size(s)).next() {
            let v = out.prop_holds(p, w0);
            out.set_prop(p, s, w0, v);
        }
    }
    let map = |s: &Sort, w: World| embed[s].get(&w).copied().unwrap_or_else(|| padding[s]);
    for (j, s, w) in m.noms() {
        out.set_nom(j, s, map(s, w));
    }
    let mut assignment = Assignment::new();
    for (name, s, w) in g.iter() {
        assignment.set(&StateSymbol::var(name, s.clone()), map(s, w));
    }
    Submodel { model: out, assignment, embed, padding }
}
