//! Many-sorted hybrid modal logic: syntax, semantics, proof checking,
//! standard translation and an axiomatized SMC machine.

pub mod context;
pub mod formula;
pub mod sexp;
pub mod signature;
pub mod sortcheck;
pub mod syntax;
pub mod semantics;
pub mod proof;
pub mod translation;
pub mod smc;
pub mod cli;
