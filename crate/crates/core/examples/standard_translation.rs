//! Translate formulas to first-order logic, print the exchange text, and
//! compare both sides on the demo model.
//!
//! cargo run --example standard_translation

use hml::semantics::parse_mdl;
use hml::signature::parse_sig;
use hml::syntax::parse_formula;
use hml::translation::{correspondence_sides, default_pivot, export_fo, parse_fo, translate_at};

fn main() {
    let (sig, tab) = parse_sig(include_str!("../data/k.sig")).expect("k.sig");
    let (m, g) = parse_mdl(&sig, &tab, include_str!("../data/m.mdl")).expect("m.mdl");
    for text in ["(@ j t j)", "(op sigma p (op f q))", "(forall x (-> (@ x s q) (box sigma p x)))"] {
        let f = parse_formula(&sig, &tab, text).expect("formula");
        let pivot = default_pivot(&f);
        let fo = translate_at(&f, &pivot).expect("well-sorted formulas translate");
        let out = export_fo(&fo);
        let free = [(pivot.clone(), f.sort().clone())].into();
        assert_eq!(parse_fo(&sig, &tab, &free, &out).expect("exported text parses"), fo);
        println!("{text}\n  ST_{pivot}: {out}");
        for w in 0..m.size(f.sort()) {
            let (modal, first_order) = correspondence_sides(&m, &g, w, &f).unwrap();
            println!("  at {}: modal {modal}, first-order {first_order}", m.world_id(f.sort(), w).unwrap());
        }
    }
}
