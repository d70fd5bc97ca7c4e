//! Replay the library derivations, print one of them in `.prf` form, and
//! show the checker rejecting a tampered line.
//!
//! cargo run --example proof_replay

use hml::proof::library::library;
use hml::proof::{write_prf, Justification};

fn main() {
    let lib = library();
    for (name, e) in &lib {
        match e.check() {
            Ok(c) => println!("{name:<8} {:<12} {} lines ok", e.system.name(), c.lines.len()),
            Err(f) => println!("{name:<8} rejected: {f}"),
        }
    }

    let nomz = &lib["NOM_Z"];
    println!("\n{}", write_prf(&nomz.proof));

    // swap the premises of the first modus ponens
    let mut tampered = nomz.proof.clone();
    let k = tampered.iter().position(|l| matches!(l.just, Justification::Mp(..))).unwrap();
    if let Justification::Mp(i, j) = tampered[k].just {
        tampered[k].just = Justification::Mp(j, i);
    }
    let e = hml::proof::library::LibraryEntry { proof: tampered, theory: None, ..library().remove("NOM_Z").unwrap() };
    println!("tampered: {}", e.check().unwrap_err());
}
