//! Concrete interpretations of function symbols and enumeration bounds.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
}

/// Body of an expression-defined function.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Expr {
    Int(i64),
    Param(String),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(String, Vec<Expr>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunInterp {
    Expr { params: Vec<String>, body: Expr },
    Table { entries: BTreeMap<Vec<i64>, i64> },
}

impl FunInterp {
    pub fn arity(&self) -> Option<usize> {
        match self {
            FunInterp::Expr { params, .. } => Some(params.len()),
            FunInterp::Table { entries } => entries.keys().next().map(|k| k.len()),
        }
    }
}

/// Finite value domain plus one interpretation per declared function.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interpretation {
    pub domain_lo: i64,
    pub domain_hi: i64,
    pub functions: BTreeMap<String, FunInterp>,
}

impl Interpretation {
    pub fn new(domain_lo: i64, domain_hi: i64) -> Self {
        Interpretation { domain_lo, domain_hi, functions: BTreeMap::new() }
    }

    pub fn domain(&self) -> impl Iterator<Item = i64> + Clone {
        self.domain_lo..=self.domain_hi
    }

    pub fn domain_size(&self) -> usize {
        (self.domain_hi - self.domain_lo + 1).max(0) as usize
    }

    pub fn with_fun(mut self, name: &str, f: FunInterp) -> Self {
        self.functions.insert(name.to_string(), f);
        self
    }

    /// Identity on one argument.
    pub fn identity() -> FunInterp {
        FunInterp::Expr { params: vec!["a".into()], body: Expr::Param("a".into()) }
    }

    pub fn table(pairs: &[(i64, i64)]) -> FunInterp {
        FunInterp::Table { entries: pairs.iter().map(|(a, b)| (vec![*a], *b)).collect() }
    }
}

/// Limits for bounded trace enumeration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumBounds {
    /// Out-of-architecture (Dep-licensed) computations allowed per trace; `None` is unlimited.
    pub max_adversarial: Option<usize>,
    pub max_trace_len: usize,
    pub max_states: usize,
    /// Cap on the number of distinct values tried per freely chosen slot.
    pub value_cap: Option<usize>,
}

impl Default for EnumBounds {
    fn default() -> Self {
        EnumBounds { max_adversarial: None, max_trace_len: 256, max_states: 2_000_000, value_cap: None }
    }
}

/// The optional `model` section of a bundle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Model {
    pub interp: Interpretation,
    pub bounds: EnumBounds,
}
