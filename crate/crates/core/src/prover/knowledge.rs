//! Knowledge and belief: base facts from the architecture and their deductive closure.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::deduce::{close, Closure, DeductionBudget, Origin};
use super::{Derivation, Mutation, ProverOptions};
use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Tag {
    K,
    B,
}

/// An equation the architecture lets a component know or believe, possibly quantified over
/// an index variable.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseFact {
    pub eq: Equation,
    pub tag: Tag,
    pub rule: String,
    /// The architecture relations the fact rests on.
    pub relations: Vec<String>,
}

#[derive(Clone, Debug, Default)]
pub struct ComponentKnowledge {
    pub base: Vec<BaseFact>,
    /// Ground instances of K base facts, with the base fact each one comes from.
    k_ground: Vec<(Equation, usize)>,
    /// Ground instances of B base facts.
    b_ground: Vec<(Equation, usize)>,
    pub known: Closure,
    /// Closure of known and believed facts together.
    pub believed: Closure,
}

/// Per-component known (K) and believed (B) equations.
#[derive(Clone, Debug, Default)]
pub struct KnowledgeBase {
    pub components: BTreeMap<String, ComponentKnowledge>,
}

pub fn mirror(e: &Equation) -> Equation {
    let rel = match e.rel {
        Rel::Eq => Rel::Eq,
        Rel::Lt => Rel::Gt,
        Rel::Gt => Rel::Lt,
        Rel::Le => Rel::Ge,
        Rel::Ge => Rel::Le,
    };
    Equation::new(e.rhs.clone(), rel, e.lhs.clone())
}

fn ground(a: &Architecture, e: &Equation) -> Vec<Equation> {
    expand_equation(e, a).unwrap_or_else(|_| vec![e.clone()])
}

pub fn base_knowledge(a: &Architecture, opts: &ProverOptions) -> KnowledgeBase {
    let mut kb = KnowledgeBase::default();
    for c in &a.components {
        let mut base = Vec::new();
        let mut add =
            |eqs: &mut dyn Iterator<Item = &Equation>, tag, rule: &str, r: &Relation, author: Option<&str>| {
                let mut relations = vec![r.to_string()];
                if let Some(j) = author.filter(|j| a.trusts(c, j)) {
                    relations.push(Relation::Trust { truster: c.clone(), trustee: j.to_string() }.to_string());
                }
                for eq in eqs {
                    base.push(BaseFact { eq: eq.clone(), tag, rule: rule.into(), relations: relations.clone() });
                }
            };
        for r in a.relations.iter().filter(|r| r.owner() == c) {
            match r {
                Relation::Compute { eq, .. } => add(&mut std::iter::once(eq), Tag::K, "K1", r, None),
                Relation::Check { eqs, .. } => add(&mut eqs.iter(), Tag::K, "K2", r, None),
                Relation::VerifyProof { proof, .. } => {
                    add(&mut proof.equations(), Tag::K, "K3", r, None);
                    for at in proof.attestations().filter(|at| a.trusts(c, &at.author)) {
                        add(&mut at.equations.iter(), Tag::K, "K4", r, Some(&at.author));
                    }
                }
                Relation::VerifyAttest { attest, .. } => {
                    if a.trusts(c, &attest.author) || opts.mutation == Some(Mutation::DropK5Trust) {
                        add(&mut attest.equations.iter(), Tag::K, "K5", r, Some(&attest.author));
                    }
                }
                Relation::Spotcheck { eqs, .. } => add(&mut eqs.iter(), Tag::B, "B", r, None),
                _ => {}
            }
        }
        let mut ck = ComponentKnowledge { base, ..Default::default() };
        for (i, f) in ck.base.iter().enumerate() {
            let g = ground(a, &f.eq).into_iter().map(|e| (e, i));
            match f.tag {
                Tag::K => ck.k_ground.extend(g),
                Tag::B => ck.b_ground.extend(g),
            }
        }
        kb.components.insert(c.clone(), ck);
    }
    reclose(kb, a, DeductionBudget::default(), false)
}

/// Closes every component's facts under its own deduction rules.
pub fn close_deduction(kb: KnowledgeBase, a: &Architecture, budget: DeductionBudget) -> KnowledgeBase {
    reclose(kb, a, budget, true)
}

fn reclose(mut kb: KnowledgeBase, a: &Architecture, budget: DeductionBudget, with_rules: bool) -> KnowledgeBase {
    for (c, ck) in kb.components.iter_mut() {
        let rules: Vec<&DeductionRule> = if with_rules { a.rules_of(c).collect() } else { Vec::new() };
        let k: Vec<Equation> = ck.k_ground.iter().map(|(e, _)| e.clone()).collect();
        let kb_all: Vec<Equation> = k.iter().cloned().chain(ck.b_ground.iter().map(|(e, _)| e.clone())).collect();
        ck.known = close(&k, &rules, budget);
        ck.believed = close(&kb_all, &rules, budget);
    }
    kb
}

impl ComponentKnowledge {
    fn find(c: &Closure, e: &Equation) -> Option<usize> {
        c.position(e).or_else(|| c.position(&mirror(e)))
    }

    fn quantified(&self, e: &Equation, tag: Tag) -> Option<&BaseFact> {
        let m = mirror(e);
        self.base.iter().find(|f| f.tag == tag && (f.eq == *e || f.eq == m))
    }

    fn base_node(&self, c: &str, fi: usize, concl: &Equation) -> Derivation {
        let f = &self.base[fi];
        let premises = f.relations.iter().map(|r| Derivation::leaf("relation", r.clone())).collect();
        Derivation::node(f.rule.clone(), format!("{}_{c}({concl})", f.tag_name()), premises)
    }

    fn known_tree(&self, c: &str, at: usize) -> Derivation {
        let e = &self.known.facts[at];
        match &self.known.origins[at] {
            Origin::Base(i) => self.base_node(c, self.k_ground[*i].1, e),
            Origin::Rule { rule, premises } => {
                let mut prem = vec![Derivation::leaf("rule", format!("{rule} of {c}"))];
                prem.extend(premises.iter().map(|p| self.known_tree(c, *p)));
                Derivation::node("K▷", format!("K_{c}({e})"), prem)
            }
        }
    }

    fn believed_tree(&self, c: &str, at: usize) -> Derivation {
        let e = &self.believed.facts[at];
        if let Some(k) = self.known.position(e) {
            return Derivation::node("KB", format!("B_{c}({e})"), vec![self.known_tree(c, k)]);
        }
        match &self.believed.origins[at] {
            Origin::Base(i) => {
                let kn = self.k_ground.len();
                self.base_node(c, self.b_ground[*i - kn].1, e)
            }
            Origin::Rule { rule, premises } => {
                let mut prem = vec![Derivation::leaf("rule", format!("{rule} of {c}"))];
                prem.extend(premises.iter().map(|p| self.believed_tree(c, *p)));
                Derivation::node("B▷", format!("B_{c}({e})"), prem)
            }
        }
    }

    /// Derivation of `K_c(e)` for a single (possibly quantified) equation.
    pub fn derive_known(&self, a: &Architecture, c: &str, e: &Equation) -> Result<Derivation, Equation> {
        if let Some(f) = self.quantified(e, Tag::K) {
            let fi = self.base.iter().position(|x| x == f).unwrap_or(0);
            return Ok(self.base_node(c, fi, e));
        }
        let mut prem = Vec::new();
        for g in ground(a, e) {
            match Self::find(&self.known, &g) {
                Some(at) => prem.push(self.known_tree(c, at)),
                None => return Err(g),
            }
        }
        Ok(if prem.len() == 1 { prem.remove(0) } else { Derivation::node("K∧", format!("K_{c}({e})"), prem) })
    }

    pub fn derive_believed(&self, a: &Architecture, c: &str, e: &Equation) -> Result<Derivation, Equation> {
        if let Ok(d) = self.derive_known(a, c, e) {
            return Ok(Derivation::node("KB", format!("B_{c}({e})"), vec![d]));
        }
        if let Some(f) = self.quantified(e, Tag::B) {
            let fi = self.base.iter().position(|x| x == f).unwrap_or(0);
            return Ok(self.base_node(c, fi, e));
        }
        let mut prem = Vec::new();
        for g in ground(a, e) {
            match Self::find(&self.believed, &g) {
                Some(at) => prem.push(self.believed_tree(c, at)),
                None => return Err(g),
            }
        }
        Ok(if prem.len() == 1 { prem.remove(0) } else { Derivation::node("B∧", format!("B_{c}({e})"), prem) })
    }

    pub fn known_ground(&self) -> &[Equation] {
        &self.known.facts
    }

    pub fn believed_ground(&self) -> &[Equation] {
        &self.believed.facts
    }
}

impl BaseFact {
    fn tag_name(&self) -> &'static str {
        match self.tag {
            Tag::K => "K",
            Tag::B => "B",
        }
    }
}

impl KnowledgeBase {
    pub fn of(&self, c: &str) -> Option<&ComponentKnowledge> {
        self.components.get(c)
    }
}
