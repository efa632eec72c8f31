//! Inference system for possession, knowledge and belief goals.
//!
//! Possession goals are decided from a saturation of ALL / ONE / NONE sets; knowledge and
//! belief goals from the architecture's base facts closed under each component's deduction
//! rules. Successful goals come with a [`Derivation`].

mod deduce;
mod derivation;
mod has;
mod knowledge;

pub use deduce::{close, Closure, DeductionBudget, Origin};
pub use derivation::Derivation;
pub use has::{saturate_has, HasStatus};
pub use knowledge::{base_knowledge, close_deduction, mirror, BaseFact, ComponentKnowledge, KnowledgeBase, Tag};

use serde::{Deserialize, Serialize};

use crate::model::*;

/// Deliberate defects used to check that cross-validation catches unsound inferences.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mutation {
    /// Accept verified attestations from untrusted authors.
    DropK5Trust,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProverOptions {
    pub budget: DeductionBudget,
    pub mutation: Option<Mutation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum ProofOutcome {
    Proved { derivation: Derivation },
    NotProvable { reason: String },
    BudgetExhausted { reason: String },
}

impl ProofOutcome {
    pub fn is_proved(&self) -> bool {
        matches!(self, ProofOutcome::Proved { .. })
    }

    pub fn derivation(&self) -> Option<&Derivation> {
        match self {
            ProofOutcome::Proved { derivation } => Some(derivation),
            _ => None,
        }
    }
}

/// Prover state for one architecture; saturation is shared across goals.
#[derive(Clone, Debug)]
pub struct Prover {
    arch: Architecture,
    has: HasStatus,
    kb: KnowledgeBase,
}

impl Prover {
    pub fn new(a: &Architecture, opts: ProverOptions) -> Self {
        let has = saturate_has(a);
        let kb = close_deduction(base_knowledge(a, &opts), a, opts.budget);
        Prover { arch: a.clone(), has, kb }
    }

    pub fn has_status(&self) -> &HasStatus {
        &self.has
    }

    pub fn knowledge(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn prove(&self, goal: &Formula) -> ProofOutcome {
        match self.derive(goal) {
            Ok(derivation) => ProofOutcome::Proved { derivation },
            Err((reason, true)) => ProofOutcome::BudgetExhausted { reason },
            Err((reason, false)) => ProofOutcome::NotProvable { reason },
        }
    }

    /// `Err((reason, budget_exhausted))` on failure.
    fn derive(&self, goal: &Formula) -> Result<Derivation, (String, bool)> {
        let fail = |s: String| Err((s, false));
        match goal {
            Formula::HasAll { component: c, var } => match self.has.derive_all(c, var) {
                Some(d) => Ok(d),
                None => fail(format!("{c} cannot obtain every element of {var}")),
            },
            Formula::HasNone { component: c, var } => match self.has.derive_none(c, var) {
                Some(d) => Ok(d),
                None => fail(format!("{c} may obtain a value of {var}")),
            },
            Formula::HasOne { component: c, var } => match self.has.derive_one(c, var) {
                Some(d) => Ok(d),
                None => fail(format!("no rule bounds what {c} obtains of {var} to one element")),
            },
            Formula::Knows { component: c, eqs } | Formula::Believes { component: c, eqs } => {
                let believe = matches!(goal, Formula::Believes { .. });
                let Some(ck) = self.kb.of(c) else { return fail(format!("unknown component {c}")) };
                let mut prem = Vec::new();
                for e in eqs {
                    let r =
                        if believe { ck.derive_believed(&self.arch, c, e) } else { ck.derive_known(&self.arch, c, e) };
                    match r {
                        Ok(d) => prem.push(d),
                        Err(g) => {
                            let exhausted = if believe { ck.believed.exhausted } else { ck.known.exhausted };
                            let m = if believe { "believe" } else { "establish" };
                            let mut reason = format!("{c} cannot {m} {g}");
                            let missing = missing_trust(&self.arch, c, e);
                            if !missing.is_empty() {
                                reason.push_str(&format!(" (verified attestation lacks {})", missing.join(", ")));
                            }
                            return Err((reason, exhausted));
                        }
                    }
                }
                if prem.len() == 1 {
                    return Ok(prem.remove(0));
                }
                let rule = if believe { "B∧" } else { "K∧" };
                Ok(Derivation::node(rule, goal.to_string(), prem))
            }
            Formula::And(l, r) => Ok(Derivation::node("I∧", goal.to_string(), vec![self.derive(l)?, self.derive(r)?])),
        }
    }
}

/// Trust relations that would let `c` know `e` from attestations it already verifies.
fn missing_trust(a: &Architecture, c: &str, e: &Equation) -> Vec<String> {
    let m = knowledge::mirror(e);
    let mut out = Vec::new();
    for r in a.relations.iter().filter(|r| r.owner() == c) {
        let attests: Vec<&Attestation> = match r {
            Relation::VerifyAttest { attest, .. } => vec![attest],
            Relation::VerifyProof { proof, .. } => proof.attestations().collect(),
            _ => continue,
        };
        for at in attests {
            if !a.trusts(c, &at.author) && at.equations.iter().any(|x| *x == *e || *x == m) {
                let t = Relation::Trust { truster: c.to_string(), trustee: at.author.clone() }.to_string();
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
    }
    out
}

/// One-shot convenience wrapper around [`Prover`].
pub fn prove(a: &Architecture, goal: &Formula, opts: ProverOptions) -> ProofOutcome {
    Prover::new(a, opts).prove(goal)
}
