//! Evaluate formulas on the demo model in `data/`, world by world and as
//! validity (every world, every assignment of the free variables).
//!
//! cargo run --example model_check

use hml::semantics::parse_mdl;
use hml::signature::parse_sig;
use hml::syntax::parse_formula;

fn main() {
    let (sig, tab) = parse_sig(include_str!("../data/k.sig")).expect("k.sig");
    let (m, g) = parse_mdl(&sig, &tab, include_str!("../data/m.mdl")).expect("m.mdl");
    for text in ["p", "(op sigma p q)", "(@ j s j)", "(@ x s (op f q))", "(forall x (op f q))"] {
        let f = parse_formula(&sig, &tab, text).expect("formula");
        let worlds: Vec<String> = (0..m.size(f.sort()))
            .map(|w| format!("{}={}", m.world_id(f.sort(), w).unwrap(), m.satisfies(&g, w, &f).unwrap() as u8))
            .collect();
        println!("{text:<24} {}  valid: {}", worlds.join(" "), m.valid(&f).unwrap());
    }
}
