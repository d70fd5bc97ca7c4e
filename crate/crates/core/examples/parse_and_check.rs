//! Load a signature, parse formulas in the prefix syntax, and sort-check
//! them. Sugar (`and`, `->`, `box`, `exists`) expands at parse time.
//!
//! cargo run --example parse_and_check

use hml::signature::parse_sig;
use hml::sortcheck::sort_of;
use hml::syntax::{parse_formula, print_formula};

const SIG: &str = "
sort s
sort t
op sigma : s t -> s
prop p : s
prop q : t
nom j : t
svar x : t
";

fn main() {
    let (sig, tab) = parse_sig(SIG).expect("signature");
    for text in [
        "(op sigma p q)",
        "(box sigma p (not q))",
        "(forall x (-> (@ x s q) (op sigma p x)))",
        "(@ j s (and q (exists x x)))",
        // ill-sorted: sigma wants an s then a t
        "(op sigma q p)",
    ] {
        match parse_formula(&sig, &tab, text) {
            Ok(f) => {
                let s = sort_of(&sig, &tab, &f).expect("parse_formula sort-checks");
                println!("{text}\n  => {} : {s}  (depth {})", print_formula(&f), f.depth());
            }
            Err(e) => println!("{text}\n  rejected: {e}"),
        }
    }
}
