//! Architecture relations and declarations.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::term::{display_conj, Equation, Index, VarRef};

pub type ComponentId = String;

/// A single storage cell: a scalar, or one element of an array. Serialized as `x` or `x[k]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Slot {
    pub var: String,
    pub index: Option<usize>,
}

impl Slot {
    pub fn scalar(var: impl Into<String>) -> Self {
        Slot { var: var.into(), index: None }
    }

    pub fn elem(var: impl Into<String>, k: usize) -> Self {
        Slot { var: var.into(), index: Some(k) }
    }

    pub fn to_var_ref(&self) -> VarRef {
        match self.index {
            None => VarRef::whole(self.var.clone()),
            Some(k) => VarRef::at(self.var.clone(), k),
        }
    }
}

impl std::str::FromStr for Slot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.strip_suffix(']').and_then(|r| r.split_once('[')) {
            Some((v, k)) => k.parse().map(|k| Slot::elem(v, k)).map_err(|_| format!("bad slot `{s}`")),
            None if !s.is_empty() && !s.contains(['[', ']']) => Ok(Slot::scalar(s)),
            None => Err(format!("bad slot `{s}`")),
        }
    }
}

impl Serialize for Slot {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Slot {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Slot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.index {
            None => f.write_str(&self.var),
            Some(k) => write!(f, "{}[{}]", self.var, k),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Attestation {
    pub author: ComponentId,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ProofItem {
    Eq(Equation),
    Attest(Attestation),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ProofStatement {
    pub author: ComponentId,
    pub items: Vec<ProofItem>,
}

impl ProofStatement {
    /// Equations stated directly by the proof (nested attestations excluded).
    pub fn equations(&self) -> impl Iterator<Item = &Equation> {
        self.items.iter().filter_map(|i| match i {
            ProofItem::Eq(e) => Some(e),
            ProofItem::Attest(_) => None,
        })
    }

    pub fn attestations(&self) -> impl Iterator<Item = &Attestation> {
        self.items.iter().filter_map(|i| match i {
            ProofItem::Attest(a) => Some(a),
            ProofItem::Eq(_) => None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Statement {
    Proof(ProofStatement),
    Attest(Attestation),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Relation {
    Has {
        owner: ComponentId,
        var: VarRef,
    },
    Receive {
        receiver: ComponentId,
        sender: ComponentId,
        statements: Vec<Statement>,
        payload: Vec<VarRef>,
    },
    /// `eq.lhs` is always a variable reference (the defined variable).
    Compute {
        owner: ComponentId,
        eq: Equation,
    },
    Check {
        owner: ComponentId,
        eqs: Vec<Equation>,
    },
    VerifyProof {
        owner: ComponentId,
        proof: ProofStatement,
    },
    VerifyAttest {
        owner: ComponentId,
        attest: Attestation,
    },
    Spotcheck {
        checker: ComponentId,
        source: ComponentId,
        array: String,
        index: String,
        eqs: Vec<Equation>,
    },
    Trust {
        truster: ComponentId,
        trustee: ComponentId,
    },
}

impl Relation {
    /// The component whose state the relation acts on.
    pub fn owner(&self) -> &str {
        match self {
            Relation::Has { owner, .. }
            | Relation::Compute { owner, .. }
            | Relation::Check { owner, .. }
            | Relation::VerifyProof { owner, .. }
            | Relation::VerifyAttest { owner, .. } => owner,
            Relation::Receive { receiver, .. } => receiver,
            Relation::Spotcheck { checker, .. } => checker,
            Relation::Trust { truster, .. } => truster,
        }
    }

    /// Variable defined by a `Compute` relation.
    pub fn compute_target(&self) -> Option<&VarRef> {
        match self {
            Relation::Compute { eq, .. } => match &eq.lhs {
                super::term::Term::Var(v) => Some(v),
                _ => None,
            },
            _ => None,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Relation::Has { .. } => "Has",
            Relation::Receive { .. } => "Receive",
            Relation::Compute { .. } => "Compute",
            Relation::Check { .. } => "Check",
            Relation::VerifyProof { .. } => "VerifProof",
            Relation::VerifyAttest { .. } => "VerifAttest",
            Relation::Spotcheck { .. } => "Spotcheck",
            Relation::Trust { .. } => "Trust",
        }
    }
}

pub(crate) fn fmt_attest(a: &Attestation) -> String {
    format!("Attest_{}({{{}}})", a.author, display_conj(&a.equations))
}

pub(crate) fn fmt_statement(s: &Statement) -> String {
    match s {
        Statement::Attest(a) => fmt_attest(a),
        Statement::Proof(p) => {
            let items: Vec<String> = p
                .items
                .iter()
                .map(|i| match i {
                    ProofItem::Eq(e) => e.to_string(),
                    ProofItem::Attest(a) => fmt_attest(a),
                })
                .collect();
            format!("Proof_{}({{{}}})", p.author, items.join("; "))
        }
    }
}

/// Mathematical-style rendering, used in derivations and reports.
impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relation::Has { owner, var } => write!(f, "Has_{owner}({var})"),
            Relation::Receive { receiver, sender, statements, payload } => {
                let st: Vec<String> = statements.iter().map(fmt_statement).collect();
                let vs: Vec<String> = payload.iter().map(|v| v.to_string()).collect();
                write!(f, "Receive_{{{receiver},{sender}}}({{{}}}, {{{}}})", st.join(", "), vs.join(", "))
            }
            Relation::Compute { owner, eq, .. } => write!(f, "Compute_{owner}({eq})"),
            Relation::Check { owner, eqs } => write!(f, "Check_{owner}({{{}}})", display_conj(eqs)),
            Relation::VerifyProof { owner, proof } => {
                write!(f, "VerifProof_{owner}({})", fmt_statement(&Statement::Proof(proof.clone())))
            }
            Relation::VerifyAttest { owner, attest } => {
                write!(f, "VerifAttest_{owner}({})", fmt_attest(attest))
            }
            Relation::Spotcheck { checker, source, array, index, eqs } => {
                write!(f, "Spotcheck_{{{checker},{source}}}({array}[{index}], {{{}}})", display_conj(eqs))
            }
            Relation::Trust { truster, trustee } => write!(f, "Trust_{{{truster},{trustee}}}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArrayDecl {
    pub name: String,
    pub range: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FunDecl {
    pub name: String,
    pub arity: usize,
}

/// `Dep_i(target, sources)`: component `component` can derive `target` from `sources`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DepEntry {
    pub component: ComponentId,
    pub target: VarRef,
    pub sources: Vec<VarRef>,
}

impl DepEntry {
    pub fn index_var(&self) -> Option<&str> {
        std::iter::once(&self.target).chain(self.sources.iter()).find_map(|v| v.index_var())
    }

    pub fn instantiate(&self, k: &str, c: usize) -> DepEntry {
        DepEntry {
            component: self.component.clone(),
            target: self.target.substitute(k, c),
            sources: self.sources.iter().map(|s| s.substitute(k, c)).collect(),
        }
    }
}

impl fmt::Display for DepEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let srcs: Vec<String> = self.sources.iter().map(|v| v.to_string()).collect();
        write!(f, "Dep_{}({}, {{{}}})", self.component, self.target, srcs.join(", "))
    }
}

/// A component-specific deduction rule `{premises} |> conclusion` over equation patterns.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DeductionRule {
    pub component: ComponentId,
    pub name: String,
    pub premises: Vec<Equation>,
    pub conclusion: Equation,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Architecture {
    pub name: String,
    pub components: Vec<ComponentId>,
    pub arrays: Vec<ArrayDecl>,
    pub scalars: Vec<String>,
    pub functions: Vec<FunDecl>,
    pub relations: Vec<Relation>,
    pub deps: Vec<DepEntry>,
    pub rules: Vec<DeductionRule>,
    /// The service specification, when declared.
    pub service: Option<Vec<Equation>>,
}

impl Architecture {
    pub fn has_component(&self, c: &str) -> bool {
        self.components.iter().any(|x| x == c)
    }

    pub fn component_index(&self, c: &str) -> Option<usize> {
        self.components.iter().position(|x| x == c)
    }

    pub fn range_of(&self, name: &str) -> Option<usize> {
        self.arrays.iter().find(|a| a.name == name).map(|a| a.range)
    }

    pub fn is_array(&self, name: &str) -> bool {
        self.range_of(name).is_some()
    }

    pub fn is_scalar(&self, name: &str) -> bool {
        self.scalars.iter().any(|s| s == name)
    }

    pub fn is_variable(&self, name: &str) -> bool {
        self.is_array(name) || self.is_scalar(name)
    }

    pub fn arity_of(&self, f: &str) -> Option<usize> {
        self.functions.iter().find(|d| d.name == f).map(|d| d.arity)
    }

    /// Declared variable names, arrays first then scalars, in declaration order.
    pub fn variables(&self) -> Vec<String> {
        self.arrays.iter().map(|a| a.name.clone()).chain(self.scalars.iter().cloned()).collect()
    }

    pub fn all_slots(&self) -> Vec<Slot> {
        let mut out = Vec::new();
        for a in &self.arrays {
            out.extend((0..a.range).map(|k| Slot::elem(a.name.clone(), k)));
        }
        out.extend(self.scalars.iter().map(|s| Slot::scalar(s.clone())));
        out
    }

    /// Slots denoted by a reference. A whole array, or an element indexed by an index
    /// variable, denotes every element.
    pub fn slots_of(&self, v: &VarRef) -> Vec<Slot> {
        match (&v.index, self.range_of(&v.name)) {
            (Some(Index::Lit(k)), _) => vec![Slot::elem(v.name.clone(), *k)],
            (_, Some(r)) => (0..r).map(|k| Slot::elem(v.name.clone(), k)).collect(),
            (_, None) => vec![Slot::scalar(v.name.clone())],
        }
    }

    pub fn trusts(&self, truster: &str, trustee: &str) -> bool {
        self.relations
            .iter()
            .any(|r| matches!(r, Relation::Trust { truster: a, trustee: b } if a == truster && b == trustee))
    }

    pub fn deps_of<'a>(&'a self, c: &'a str) -> impl Iterator<Item = &'a DepEntry> + 'a {
        self.deps.iter().filter(move |d| d.component == c)
    }

    pub fn rules_of<'a>(&'a self, c: &'a str) -> impl Iterator<Item = &'a DeductionRule> + 'a {
        self.rules.iter().filter(move |d| d.component == c)
    }

    /// Copy with every array resized to `range`.
    pub fn with_uniform_range(&self, range: usize) -> Architecture {
        let mut a = self.clone();
        for d in &mut a.arrays {
            d.range = range;
        }
        a
    }
}
