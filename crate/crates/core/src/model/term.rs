//! Terms, variable references and equations.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

/// Array index: either an index variable or a natural literal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Index {
    Var(String),
    Lit(usize),
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Index::Var(v) => f.write_str(v),
            Index::Lit(n) => write!(f, "{n}"),
        }
    }
}

/// A (possibly indexed) variable reference. `index == None` denotes a scalar or a whole array.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarRef {
    pub name: String,
    pub index: Option<Index>,
}

impl VarRef {
    pub fn whole(name: impl Into<String>) -> Self {
        VarRef { name: name.into(), index: None }
    }

    pub fn at(name: impl Into<String>, k: usize) -> Self {
        VarRef { name: name.into(), index: Some(Index::Lit(k)) }
    }

    pub fn indexed(name: impl Into<String>, var: impl Into<String>) -> Self {
        VarRef { name: name.into(), index: Some(Index::Var(var.into())) }
    }

    pub fn index_var(&self) -> Option<&str> {
        match &self.index {
            Some(Index::Var(v)) => Some(v),
            _ => None,
        }
    }

    pub fn substitute(&self, k: &str, c: usize) -> VarRef {
        match &self.index {
            Some(Index::Var(v)) if v == k => VarRef::at(self.name.clone(), c),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for VarRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.index {
            None => f.write_str(&self.name),
            Some(i) => write!(f, "{}[{}]", self.name, i),
        }
    }
}

/// Name of the built-in addition usable with `iter`.
pub const BUILTIN_PLUS: &str = "+";
/// Name of the built-in multiplication usable with `iter`.
pub const BUILTIN_TIMES: &str = "*";

pub fn is_builtin(f: &str) -> bool {
    f == BUILTIN_PLUS || f == BUILTIN_TIMES
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Term {
    Var(VarRef),
    Const(i64),
    App(String, Vec<Term>),
    /// Left fold of a binary function over every element of an array.
    Iter(String, String),
    /// Pattern metavariable, only legal inside deduction rules.
    Meta(String),
}

impl Term {
    pub fn var(name: &str) -> Term {
        Term::Var(VarRef::whole(name))
    }

    pub fn app(f: &str, args: Vec<Term>) -> Term {
        Term::App(f.to_string(), args)
    }

    pub fn index_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if let Some(k) = v.index_var() {
                    out.insert(k.to_string());
                }
            }
            Term::App(_, args) => args.iter().for_each(|a| a.index_vars(out)),
            Term::Const(_) | Term::Iter(..) | Term::Meta(_) => {}
        }
    }

    /// Every variable reference read by the term. `Iter` contributes the whole array.
    pub fn var_refs(&self, out: &mut Vec<VarRef>) {
        match self {
            Term::Var(v) => out.push(v.clone()),
            Term::App(_, args) => args.iter().for_each(|a| a.var_refs(out)),
            Term::Iter(_, x) => out.push(VarRef::whole(x.clone())),
            Term::Const(_) | Term::Meta(_) => {}
        }
    }

    pub fn metas(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Meta(m) => {
                out.insert(m.clone());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.metas(out)),
            _ => {}
        }
    }

    pub fn substitute_index(&self, k: &str, c: usize) -> Term {
        match self {
            Term::Var(v) => Term::Var(v.substitute(k, c)),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.substitute_index(k, c)).collect()),
            other => other.clone(),
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{v}"),
            Term::Const(n) => write!(f, "{n}"),
            Term::App(name, args) => {
                write!(f, "{name}(")?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            Term::Iter(op, x) => write!(f, "iter({op}, {x})"),
            Term::Meta(m) => write!(f, "?{m}"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    Eq,
    Lt,
    Gt,
    Le,
    Ge,
}

impl Rel {
    pub fn symbol(self) -> &'static str {
        match self {
            Rel::Eq => "=",
            Rel::Lt => "<",
            Rel::Gt => ">",
            Rel::Le => "<=",
            Rel::Ge => ">=",
        }
    }

    pub fn holds(self, a: i64, b: i64) -> bool {
        match self {
            Rel::Eq => a == b,
            Rel::Lt => a < b,
            Rel::Gt => a > b,
            Rel::Le => a <= b,
            Rel::Ge => a >= b,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Equation {
    pub lhs: Term,
    pub rel: Rel,
    pub rhs: Term,
}

impl Equation {
    pub fn new(lhs: Term, rel: Rel, rhs: Term) -> Self {
        Equation { lhs, rel, rhs }
    }

    pub fn eq(lhs: Term, rhs: Term) -> Self {
        Equation::new(lhs, Rel::Eq, rhs)
    }

    pub fn index_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.lhs.index_vars(&mut out);
        self.rhs.index_vars(&mut out);
        out
    }

    pub fn is_ground(&self) -> bool {
        self.index_vars().is_empty()
    }

    pub fn var_refs(&self) -> Vec<VarRef> {
        let mut out = Vec::new();
        self.lhs.var_refs(&mut out);
        self.rhs.var_refs(&mut out);
        out
    }

    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.lhs.metas(&mut out);
        self.rhs.metas(&mut out);
        out
    }

    pub fn substitute_index(&self, k: &str, c: usize) -> Equation {
        Equation { lhs: self.lhs.substitute_index(k, c), rel: self.rel, rhs: self.rhs.substitute_index(k, c) }
    }
}

impl fmt::Display for Equation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {} {}", self.lhs, self.rel.symbol(), self.rhs)
    }
}

/// Renders a conjunction as `a; b; c`.
pub fn display_conj(eqs: &[Equation]) -> String {
    eqs.iter().map(|e| e.to_string()).collect::<Vec<_>>().join("; ")
}

/// Serialized as its source text, for example `x[t]` or `Fee`.
impl Serialize for VarRef {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for VarRef {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        let bad = || serde::de::Error::custom(format!("bad variable reference `{s}`"));
        let ident = |x: &str| {
            x.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
                && x.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
        };
        match s.strip_suffix(']').and_then(|r| r.split_once('[')) {
            Some((v, k)) if ident(v) => match k.parse::<usize>() {
                Ok(n) => Ok(VarRef::at(v, n)),
                Err(_) if ident(k) => Ok(VarRef::indexed(v, k)),
                Err(_) => Err(bad()),
            },
            None if ident(&s) => Ok(VarRef::whole(s)),
            _ => Err(bad()),
        }
    }
}

/// Serialized as its source text, for example `x[t] = S(Cons[t])`.
impl Serialize for Equation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Equation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        crate::dsl::parse_equation(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}
