//! The P′ derivation: after running `pgm` from `config(vs, mem)`, the state
//! named `memp` has `m ↦ 1`. Prints the numbered steps and replays the proof
//! under the SMC theory.
//!
//! cargo run --example pprime

use hml::proof::write_just;
use hml::smc::{pprime_entry, pprime_statement};
use hml::syntax::print_formula;

fn main() {
    let e = pprime_entry();
    println!("goal: {}\n", print_formula(&pprime_statement()));
    for (name, h) in &e.hyps {
        println!("{name}: {}", print_formula(h));
    }
    println!();
    for l in e.proof.iter().filter(|l| l.note.is_some()) {
        let just = write_just(&l.just);
        println!("{:>5} line {:>2}  {}", l.note.as_deref().unwrap(), l.index, just.split(['{', '[']).next().unwrap().trim_end());
    }
    match e.check() {
        Ok(c) => println!("\naccepted: {} primitive lines", c.lines.len()),
        Err(f) => println!("\nrejected: {f}"),
    }
}
