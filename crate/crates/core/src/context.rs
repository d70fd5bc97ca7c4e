//! Operator contexts `NC` and nominal contexts `NomC` (exactly one hole).

use std::sync::Arc;

use crate::formula::Formula;
use crate::signature::{Ident, Operator, Sort};
use crate::sortcheck::SortError;

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Context {
    /// `#_s`
    Hole(Sort),
    /// `⊤_s`
    Top(Sort),
    Op { op: Ident, sort: Sort, args: Vec<Context> },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("context has {0} holes; a nominal context needs exactly one")]
    HoleCount(usize),
    #[error("hole has sort {expected} but the plugged formula has sort {found}")]
    HoleSort { expected: Sort, found: Sort },
    #[error(transparent)]
    Sort(#[from] SortError),
}

impl Context {
    pub fn op(op: &Operator, args: Vec<Context>) -> Self {
        Context::Op { op: op.name.clone(), sort: op.result.clone(), args }
    }

    pub fn op_named(name: &str, sort: Sort, args: Vec<Context>) -> Self {
        Context::Op { op: Arc::from(name), sort, args }
    }

    pub fn sort(&self) -> &Sort {
        match self {
            Context::Hole(s) | Context::Top(s) => s,
            Context::Op { sort, .. } => sort,
        }
    }

    pub fn hole_count(&self) -> usize {
        match self {
            Context::Hole(_) => 1,
            Context::Top(_) => 0,
            Context::Op { args, .. } => args.iter().map(Context::hole_count).sum(),
        }
    }

    /// Membership in `NomC`.
    pub fn is_nominal(&self) -> bool {
        self.hole_count() == 1
    }

    /// The sort of the unique hole, if there is exactly one.
    pub fn hole_sort(&self) -> Option<&Sort> {
        fn find(c: &Context) -> Option<&Sort> {
            match c {
                Context::Hole(s) => Some(s),
                Context::Top(_) => None,
                Context::Op { args, .. } => args.iter().find_map(find),
            }
        }
        if self.is_nominal() {
            find(self)
        } else {
            None
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Context::Hole(_) | Context::Top(_) => 0,
            Context::Op { args, .. } => 1 + args.iter().map(Context::depth).max().unwrap_or(0),
        }
    }

    /// `η(φ) := η[φ/#]`; `⊤` leaves become `⊤` formulas.
    pub fn apply(&self, phi: &Formula) -> Result<Formula, ContextError> {
        let n = self.hole_count();
        if n != 1 {
            return Err(ContextError::HoleCount(n));
        }
        let hs = self.hole_sort().expect("one hole");
        if hs != phi.sort() {
            return Err(ContextError::HoleSort { expected: hs.clone(), found: phi.sort().clone() });
        }
        Ok(self.plug(phi))
    }

    fn plug(&self, phi: &Formula) -> Formula {
        match self {
            Context::Hole(_) => phi.clone(),
            Context::Top(s) => Formula::Top(s.clone()),
            Context::Op { op, sort, args } => Formula::App {
                op: op.clone(),
                sort: sort.clone(),
                args: args.iter().map(|a| a.plug(phi)).collect(),
            },
        }
    }

    /// The dual context applied to `φ`: `η^□(φ) := ¬η(¬φ)`.
    pub fn apply_dual(&self, phi: &Formula) -> Result<Formula, ContextError> {
        Ok(Formula::not(self.apply(&Formula::not(phi.clone()))?))
    }

    /// `η^□` as a formula transformer.
    pub fn dual(&self) -> impl Fn(&Formula) -> Result<Formula, ContextError> + '_ {
        move |phi| self.apply_dual(phi)
    }
}
