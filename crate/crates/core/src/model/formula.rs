use std::fmt;

use serde::{Deserialize, Serialize};

use super::arch::ComponentId;
use super::term::{Equation, VarRef};

/// Goal formulas over an architecture.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Formula {
    HasAll {
        component: ComponentId,
        var: VarRef,
    },
    HasNone {
        component: ComponentId,
        var: VarRef,
    },
    HasOne {
        component: ComponentId,
        var: VarRef,
    },
    /// Knowledge of a non-empty conjunction.
    Knows {
        component: ComponentId,
        eqs: Vec<Equation>,
    },
    /// Belief in a non-empty conjunction.
    Believes {
        component: ComponentId,
        eqs: Vec<Equation>,
    },
    And(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    /// Flattens nested conjunctions left to right.
    pub fn conjuncts(&self) -> Vec<&Formula> {
        match self {
            Formula::And(a, b) => {
                let mut v = a.conjuncts();
                v.extend(b.conjuncts());
                v
            }
            other => vec![other],
        }
    }

    pub fn component(&self) -> Option<&str> {
        match self {
            Formula::HasAll { component, .. }
            | Formula::HasNone { component, .. }
            | Formula::HasOne { component, .. }
            | Formula::Knows { component, .. }
            | Formula::Believes { component, .. } => Some(component),
            Formula::And(..) => None,
        }
    }
}

/// Renders in the goal syntax of the `.parch` format.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let block = |f: &mut fmt::Formatter<'_>, kw: &str, c: &str, eqs: &[Equation]| {
            write!(f, "{kw} {c} {{")?;
            for e in eqs {
                write!(f, " {e};")?;
            }
            f.write_str(" }")
        };
        match self {
            Formula::HasAll { component, var } => write!(f, "hasall {component} ({var})"),
            Formula::HasNone { component, var } => write!(f, "hasnone {component} ({var})"),
            Formula::HasOne { component, var } => write!(f, "hasone {component} ({var})"),
            Formula::Knows { component, eqs } => block(f, "K", component, eqs),
            Formula::Believes { component, eqs } => block(f, "B", component, eqs),
            Formula::And(a, b) => write!(f, "{a} & {b}"),
        }
    }
}
