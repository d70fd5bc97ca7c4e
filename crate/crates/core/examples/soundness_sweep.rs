//! Search random models for counterexamples to every axiom scheme, then to
//! the non-scheme `@_z φ → φ`, which fails.
//!
//! cargo run --release --example soundness_sweep [trials]

use hml::proof::SystemId;
use hml::semantics::sweep::{soundness_sweep, SweepConfig, SweepTarget};
use hml::syntax::print_formula;

fn main() {
    let trials = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(200);
    let cfg = SweepConfig { trials, ..SweepConfig::default() };
    for id in SystemId::H_AT_FORALL.schemes().iter().chain([&hml::proof::SchemeId::NOM]) {
        let r = soundness_sweep(SweepTarget::Scheme(*id), &cfg);
        println!("{:<12} {:>7} evaluations  {} counterexamples", id.name(), r.evaluations, r.counterexamples.len());
    }
    let r = soundness_sweep(SweepTarget::BrokenAtElim, &cfg);
    let c = &r.counterexamples[0];
    println!(
        "\nBROKEN_AT_ELIM: {} counterexamples; first at trial {}: {}\n{}",
        r.counterexamples.len(),
        c.trial,
        print_formula(&c.instance),
        hml::semantics::write_mdl(&c.model, &c.assignment)
    );
}
