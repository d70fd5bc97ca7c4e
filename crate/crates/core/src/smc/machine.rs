//! A small-step SMC interpreter whose rules follow the theory axioms one for
//! one. It knows nothing about formulas and serves as the oracle the axioms
//! are tested against.

use super::{AExp, BExp, ConcreteConfig, Ctrl, Stmt, Value};

pub const DEFAULT_FUEL: u64 = 10_000;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RunError {
    #[error("out of fuel after {0} steps")]
    OutOfFuel(u64),
    #[error("stuck: {reason} (at {config}; control {control})")]
    Stuck { config: ConcreteConfig, control: String, reason: String },
}

/// A configuration plus the pending control stack.
#[derive(Debug, Clone)]
pub struct Machine {
    pub config: ConcreteConfig,
    /// Next item last.
    control: Vec<Ctrl>,
    fuel: u64,
    steps: u64,
}

impl Machine {
    pub fn new(config: ConcreteConfig, ctrl: Ctrl, fuel: u64) -> Self {
        Machine { config, control: vec![ctrl], fuel, steps: 0 }
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn is_done(&self) -> bool {
        self.control.is_empty()
    }

    fn stuck<T>(&mut self, c: Ctrl, reason: String) -> Result<T, RunError> {
        self.control.push(c);
        let control = self.control.iter().rev().map(|c| c.to_string()).collect::<Vec<_>>().join(" ; ");
        Err(RunError::Stuck { config: self.config.clone(), control, reason })
    }

    fn then(&mut self, items: Vec<Ctrl>) {
        self.control.extend(items.into_iter().rev());
    }

    fn pop_nat(&mut self) -> Option<u64> {
        match self.config.stack.first() {
            Some(Value::Nat(n)) => {
                let n = *n;
                self.config.stack.remove(0);
                Some(n)
            }
            _ => None,
        }
    }

    fn push(&mut self, v: Value) {
        self.config.stack.insert(0, v);
    }

    /// Whether a branch may start here: unguarded branches always may.
    fn enabled(&self, c: &Ctrl) -> bool {
        c.leading_test().is_none_or(|v| self.config.stack.first() == Some(&v))
    }

    /// Performs one transition; `Ok(false)` once the control stack is empty.
    pub fn step(&mut self) -> Result<bool, RunError> {
        if self.control.is_empty() {
            return Ok(false);
        }
        if self.fuel == 0 {
            return Err(RunError::OutOfFuel(self.steps));
        }
        let c = self.control.pop().expect("non-empty");
        self.fuel -= 1;
        self.steps += 1;
        match c {
            Ctrl::AExp(AExp::Num(n)) => self.push(Value::Nat(n)),
            Ctrl::AExp(AExp::Var(ref x)) => {
                let n = self.config.memory.get(x);
                self.push(Value::Nat(n));
            }
            Ctrl::AExp(AExp::Plus(a1, a2)) => self.then(vec![Ctrl::AExp(*a1), Ctrl::AExp(*a2), Ctrl::Plus]),
            Ctrl::BExp(BExp(a1, a2)) => self.then(vec![Ctrl::AExp(a2), Ctrl::AExp(a1), Ctrl::Leq]),
            Ctrl::Stmt(Stmt::Seq(s1, s2)) => self.then(vec![Ctrl::Stmt(*s1), Ctrl::Stmt(*s2)]),
            Ctrl::Stmt(Stmt::Assign(x, a)) => self.then(vec![Ctrl::AExp(a), Ctrl::Asgn(x)]),
            Ctrl::Stmt(Stmt::If(b, s1, s2)) => self.then(vec![
                Ctrl::BExp(b),
                Ctrl::Union(
                    Box::new(Ctrl::seq(Ctrl::Test(Value::Bool(true)), Ctrl::Stmt(*s1))),
                    Box::new(Ctrl::seq(Ctrl::Test(Value::Bool(false)), Ctrl::Stmt(*s2))),
                ),
            ]),
            Ctrl::Stmt(Stmt::While(b, s)) => {
                let body = Ctrl::seq(Ctrl::Test(Value::Bool(true)), Ctrl::seq(Ctrl::Stmt(*s), Ctrl::BExp(b.clone())));
                self.then(vec![Ctrl::BExp(b), Ctrl::Star(Box::new(body)), Ctrl::Test(Value::Bool(false))]);
            }
            Ctrl::Stmt(Stmt::Skip) => {}
            Ctrl::Asgn(ref x) => match self.pop_nat() {
                Some(n) => self.config.memory.set(x, n),
                None => return self.stuck(c, "asgn needs a number on top of the stack".into()),
            },
            Ctrl::Plus => {
                let before = self.config.stack.clone();
                match (self.pop_nat(), self.pop_nat()) {
                    (Some(n2), Some(n1)) => self.push(Value::Nat(n1 + n2)),
                    _ => {
                        self.config.stack = before;
                        return self.stuck(c, "plus needs two numbers on the stack".into());
                    }
                }
            }
            Ctrl::Leq => {
                let before = self.config.stack.clone();
                match (self.pop_nat(), self.pop_nat()) {
                    (Some(n1), Some(n2)) => self.push(Value::Bool(n1 <= n2)),
                    _ => {
                        self.config.stack = before;
                        return self.stuck(c, "leq needs two numbers on the stack".into());
                    }
                }
            }
            Ctrl::Test(v) => {
                if self.config.stack.first() != Some(&v) {
                    return self.stuck(c, format!("test {v}? fails"));
                }
                self.config.stack.remove(0);
            }
            Ctrl::Seq(a, b) => self.then(vec![*a, *b]),
            // Test-guarded choice: the left branch wins when both are enabled.
            Ctrl::Union(a, b) => {
                if self.enabled(&a) {
                    self.control.push(*a);
                } else if self.enabled(&b) {
                    self.control.push(*b);
                } else {
                    return self.stuck(Ctrl::Union(a, b), "no branch of the choice is enabled".into());
                }
            }
            // Unroll while the body's leading test would pass; an unguarded
            // body is taken zero times.
            Ctrl::Star(a) => {
                if a.leading_test().is_some() && self.enabled(&a) {
                    let again = Ctrl::Star(a.clone());
                    self.then(vec![*a, again]);
                }
            }
        }
        Ok(true)
    }

    pub fn run(&mut self) -> Result<(), RunError> {
        while self.step()? {}
        Ok(())
    }
}

/// Runs `ctrl` from `cfg` to an empty control stack.
pub fn smc_run(cfg: ConcreteConfig, ctrl: &Ctrl, fuel: u64) -> Result<ConcreteConfig, RunError> {
    let mut m = Machine::new(cfg, ctrl.clone(), fuel);
    m.run()?;
    Ok(m.config)
}

pub fn run_program(stmt: &Stmt, cfg: ConcreteConfig, fuel: u64) -> Result<ConcreteConfig, RunError> {
    smc_run(cfg, &Ctrl::Stmt(stmt.clone()), fuel)
}
