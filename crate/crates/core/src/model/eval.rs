//! Evaluation of terms and equations over a variable state, plus index expansion.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::arch::{Architecture, Slot};
use super::interp::{BinOp, Expr, FunInterp, Interpretation};
use super::term::{Equation, Index, Term, BUILTIN_PLUS, BUILTIN_TIMES};

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("function `{name}` expects {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("index {index} out of range for `{var}` (range {range})")]
    IndexOutOfRange { var: String, index: usize, range: usize },
    #[error("term is not ground: index variable `{0}` is free")]
    NotGround(String),
    #[error("`{fun}` has no table entry for {args:?}")]
    OutsideTable { fun: String, args: Vec<i64> },
    #[error("metavariable `?{0}` cannot be evaluated")]
    Meta(String),
    #[error("ambiguous index expansion: {0}")]
    AmbiguousIndex(String),
    #[error("interpretation of `{0}` recurses too deeply")]
    Recursion(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Value {
    Defined(i64),
    Undefined,
}

impl Value {
    pub fn defined(self) -> Option<i64> {
        match self {
            Value::Defined(v) => Some(v),
            Value::Undefined => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Truth {
    True,
    False,
    Undefined,
}

/// Read access to a variable state. Absent slots are undefined.
pub trait Valuation {
    fn lookup(&self, slot: &Slot) -> Option<i64>;
}

impl Valuation for BTreeMap<Slot, i64> {
    fn lookup(&self, slot: &Slot) -> Option<i64> {
        self.get(slot).copied()
    }
}

/// Looks in `primary` first, then `fallback`.
pub struct Layered<'a, A: Valuation, B: Valuation> {
    pub primary: &'a A,
    pub fallback: &'a B,
}

impl<A: Valuation, B: Valuation> Valuation for Layered<'_, A, B> {
    fn lookup(&self, slot: &Slot) -> Option<i64> {
        self.primary.lookup(slot).or_else(|| self.fallback.lookup(slot))
    }
}

const MAX_CALL_DEPTH: usize = 64;

/// Evaluates a ground term. Undefined is absorbing.
pub fn eval_term(
    t: &Term,
    vs: &impl Valuation,
    interp: &Interpretation,
    arch: &Architecture,
) -> Result<Value, ModelError> {
    match t {
        Term::Const(c) => Ok(Value::Defined(*c)),
        Term::Meta(m) => Err(ModelError::Meta(m.clone())),
        Term::Var(v) => {
            let slot = match (&v.index, arch.range_of(&v.name)) {
                (None, None) if arch.is_scalar(&v.name) => Slot::scalar(v.name.clone()),
                (None, Some(_)) => {
                    return Err(ModelError::AmbiguousIndex(format!("array `{}` used as a scalar", v.name)))
                }
                (Some(Index::Var(k)), _) => return Err(ModelError::NotGround(k.clone())),
                (Some(Index::Lit(k)), Some(r)) => {
                    if *k >= r {
                        return Err(ModelError::IndexOutOfRange { var: v.name.clone(), index: *k, range: r });
                    }
                    Slot::elem(v.name.clone(), *k)
                }
                _ => return Err(ModelError::UnknownVariable(v.name.clone())),
            };
            Ok(vs.lookup(&slot).map_or(Value::Undefined, Value::Defined))
        }
        Term::App(f, args) => {
            let mut vals = Vec::with_capacity(args.len());
            let mut undefined = false;
            for a in args {
                match eval_term(a, vs, interp, arch)? {
                    Value::Defined(v) => vals.push(v),
                    Value::Undefined => undefined = true,
                }
            }
            if undefined {
                // still validate the function symbol
                lookup_fun(f, args.len(), interp)?;
                return Ok(Value::Undefined);
            }
            apply(f, &vals, interp, 0).map(Value::Defined)
        }
        Term::Iter(f, x) => {
            let range = arch.range_of(x).ok_or_else(|| ModelError::UnknownVariable(x.clone()))?;
            let mut elems = Vec::with_capacity(range);
            for k in 0..range {
                match vs.lookup(&Slot::elem(x.clone(), k)) {
                    Some(v) => elems.push(v),
                    None => {
                        lookup_fun(f, 2, interp)?;
                        return Ok(Value::Undefined);
                    }
                }
            }
            let mut acc = elems[0];
            for v in &elems[1..] {
                acc = apply(f, &[acc, *v], interp, 0)?;
            }
            Ok(Value::Defined(acc))
        }
    }
}

fn lookup_fun<'a>(f: &str, n: usize, interp: &'a Interpretation) -> Result<Option<&'a FunInterp>, ModelError> {
    if f == BUILTIN_PLUS || f == BUILTIN_TIMES {
        if n != 2 {
            return Err(ModelError::Arity { name: f.into(), expected: 2, got: n });
        }
        return Ok(None);
    }
    let fi = interp.functions.get(f).ok_or_else(|| ModelError::UnknownFunction(f.into()))?;
    if let Some(a) = fi.arity() {
        if a != n {
            return Err(ModelError::Arity { name: f.into(), expected: a, got: n });
        }
    }
    Ok(Some(fi))
}

fn apply(f: &str, args: &[i64], interp: &Interpretation, depth: usize) -> Result<i64, ModelError> {
    if depth > MAX_CALL_DEPTH {
        return Err(ModelError::Recursion(f.into()));
    }
    match lookup_fun(f, args.len(), interp)? {
        None if f == BUILTIN_PLUS => Ok(args[0].wrapping_add(args[1])),
        None => Ok(args[0].wrapping_mul(args[1])),
        Some(FunInterp::Table { entries }) => {
            entries.get(args).copied().ok_or_else(|| ModelError::OutsideTable { fun: f.into(), args: args.to_vec() })
        }
        Some(FunInterp::Expr { params, body }) => {
            let env: BTreeMap<&str, i64> = params.iter().map(String::as_str).zip(args.iter().copied()).collect();
            eval_expr(body, &env, interp, depth + 1)
        }
    }
}

fn eval_expr(e: &Expr, env: &BTreeMap<&str, i64>, interp: &Interpretation, depth: usize) -> Result<i64, ModelError> {
    match e {
        Expr::Int(n) => Ok(*n),
        Expr::Param(p) => env.get(p.as_str()).copied().ok_or_else(|| ModelError::UnknownVariable(p.clone())),
        Expr::Bin(op, a, b) => {
            let (a, b) = (eval_expr(a, env, interp, depth)?, eval_expr(b, env, interp, depth)?);
            Ok(match op {
                BinOp::Add => a.wrapping_add(b),
                BinOp::Sub => a.wrapping_sub(b),
                BinOp::Mul => a.wrapping_mul(b),
            })
        }
        Expr::Call(f, args) => {
            let vals = args.iter().map(|a| eval_expr(a, env, interp, depth)).collect::<Result<Vec<_>, _>>()?;
            apply(f, &vals, interp, depth)
        }
    }
}

pub fn eval_eq(
    e: &Equation,
    vs: &impl Valuation,
    interp: &Interpretation,
    arch: &Architecture,
) -> Result<Truth, ModelError> {
    let l = eval_term(&e.lhs, vs, interp, arch)?;
    let r = eval_term(&e.rhs, vs, interp, arch)?;
    Ok(match (l, r) {
        (Value::Defined(a), Value::Defined(b)) => {
            if e.rel.holds(a, b) {
                Truth::True
            } else {
                Truth::False
            }
        }
        _ => Truth::Undefined,
    })
}

/// Arrays indexed by `k` anywhere in `e`.
fn arrays_indexed_by(e: &Equation, k: &str) -> Vec<String> {
    e.var_refs().into_iter().filter(|v| v.index_var() == Some(k)).map(|v| v.name).collect()
}

/// Substitutes `ck` for the index variable `k`, checking the bound against every array it indexes.
pub fn instantiate_index(e: &Equation, k: &str, ck: usize, arch: &Architecture) -> Result<Equation, ModelError> {
    for x in arrays_indexed_by(e, k) {
        let range = arch.range_of(&x).ok_or_else(|| ModelError::UnknownVariable(x.clone()))?;
        if ck >= range {
            return Err(ModelError::IndexOutOfRange { var: x, index: ck, range });
        }
    }
    Ok(e.substitute_index(k, ck))
}

/// The shared range of the arrays indexed by `k` in `e`.
pub fn index_range(e: &Equation, k: &str, arch: &Architecture) -> Result<usize, ModelError> {
    let mut range = None;
    for x in arrays_indexed_by(e, k) {
        let r = arch.range_of(&x).ok_or_else(|| ModelError::UnknownVariable(x.clone()))?;
        match range {
            None => range = Some(r),
            Some(prev) if prev != r => {
                return Err(ModelError::AmbiguousIndex(format!(
                    "index `{k}` ranges over arrays of different sizes ({prev} and {r})"
                )))
            }
            _ => {}
        }
    }
    range.ok_or_else(|| ModelError::AmbiguousIndex(format!("index `{k}` indexes no array")))
}

/// Expands an equation with (at most one) free index variable into its ground instances.
pub fn expand_equation(e: &Equation, arch: &Architecture) -> Result<Vec<Equation>, ModelError> {
    let vars = e.index_vars();
    let mut it = vars.iter();
    match (it.next(), it.next()) {
        (None, _) => Ok(vec![e.clone()]),
        (Some(k), None) => {
            let range = index_range(e, k, arch)?;
            Ok((0..range).map(|c| e.substitute_index(k, c)).collect())
        }
        (Some(a), Some(b)) => {
            Err(ModelError::AmbiguousIndex(format!("equation `{e}` has two free index variables `{a}` and `{b}`")))
        }
    }
}

pub fn expand_all<'a>(
    eqs: impl IntoIterator<Item = &'a Equation>,
    arch: &Architecture,
) -> Result<Vec<Equation>, ModelError> {
    let mut out = Vec::new();
    for e in eqs {
        out.extend(expand_equation(e, arch)?);
    }
    Ok(out)
}
