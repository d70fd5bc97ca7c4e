//! Parse an `.imp` program, encode it as a `Stmt` formula, and run it on the
//! SMC machine.
//!
//! cargo run --example smc_machine

use hml::smc::{encode_program, parse_program, print_stmt, run_program, ConcreteConfig, Memory, Value, DEFAULT_FUEL};
use hml::syntax::print_formula;

fn main() {
    let pgm = include_str!("../data/pgm.imp");
    let stmt = parse_program(pgm).expect("pgm.imp");
    println!("program: {}", print_stmt(&stmt));
    println!("term:    {}", print_formula(&encode_program(pgm).unwrap()));
    let start = ConcreteConfig::new(vec![Value::Nat(7), Value::Bool(true)], Memory::new().with("m", 9));
    let end = run_program(&stmt, start.clone(), DEFAULT_FUEL).expect("pgm terminates");
    println!("before:  {start}\nafter:   {end}");

    let sum = parse_program(include_str!("../data/sum.imp")).expect("sum.imp");
    let end = run_program(&sum, ConcreteConfig::new(vec![], Memory::new().with("n", 9)), DEFAULT_FUEL).unwrap();
    println!("\nsum to 9: {}", end.memory.get("s"));
    let err = run_program(&sum, ConcreteConfig::new(vec![], Memory::new().with("n", 9)), 50).unwrap_err();
    println!("with 50 steps of fuel: {err}");
}
