use std::fmt;

use serde::{Deserialize, Serialize};

use super::{implies, Oracle, OracleOptions, SemanticVerdict, Verdict};
use crate::model::*;
use crate::prover::{ProofOutcome, Prover, ProverOptions};

/// Known reasons why a semantically valid goal has no derivation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GapKind {
    /// Has^one of a scalar or a single element: it never holds two values, yet only HNO and
    /// H4 conclude Has^one.
    SingleSlotHasOne,
    /// A spotcheck (or a derivation from one) reveals elements that ALL does not contain.
    SpotcheckDisclosure,
    /// NONE excludes slots reachable only through Dep licences that can never fire, for
    /// instance a source array only ever sampled one element at a time.
    UnrealisableDependency,
    /// The component's facts entail the goal semantically, not syntactically.
    SemanticEntailment,
    /// Every state of the component is doomed, so the knowledge goal holds vacuously.
    VacuousKnowledge,
    Unclassified,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status", content = "gap")]
pub enum Agreement {
    Agree,
    /// Proved but semantically failing: a prover bug.
    Soundness,
    /// Semantically valid but not proved.
    CompletenessGap(GapKind),
    /// A bound truncated the exploration, so the disagreement is not conclusive.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoalCheck {
    pub goal: String,
    pub proved: bool,
    pub prover: ProofOutcome,
    pub semantic: SemanticVerdict,
    pub agreement: Agreement,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub explanation: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrosscheckReport {
    pub architecture: String,
    pub states: usize,
    pub exhaustive: bool,
    pub goals: Vec<GoalCheck>,
    pub soundness_discrepancies: usize,
    pub completeness_gaps: usize,
    pub unclassified_gaps: usize,
}

impl CrosscheckReport {
    pub fn soundness(&self) -> impl Iterator<Item = &GoalCheck> {
        self.goals.iter().filter(|g| g.agreement == Agreement::Soundness)
    }
}

impl fmt::Display for CrosscheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{}: {} states ({})",
            self.architecture,
            self.states,
            if self.exhaustive { "exhaustive" } else { "bounded" }
        )?;
        for g in &self.goals {
            let p = if g.proved { "proved" } else { "not proved" };
            let s = match g.semantic.verdict {
                Verdict::Holds => "holds",
                Verdict::Fails => "fails",
                Verdict::HoldsWithinBounds => "holds within bounds",
            };
            let tag = match g.agreement {
                Agreement::Agree => "agree".to_string(),
                Agreement::Soundness => "SOUNDNESS DISCREPANCY".to_string(),
                Agreement::CompletenessGap(k) => {
                    format!("completeness gap ({})", serde_json::to_value(k).unwrap().as_str().unwrap_or(""))
                }
                Agreement::Inconclusive => "inconclusive".to_string(),
            };
            writeln!(f, "  {:<10} {:<20} {:<24} {}", p, s, tag, g.goal)?;
            if let Some(e) = &g.explanation {
                writeln!(f, "             {e}")?;
            }
            if g.agreement == Agreement::Soundness {
                if let Some(w) = &g.semantic.witness {
                    writeln!(f, "             witness: {}", w.note)?;
                    if w.trace.is_empty() {
                        writeln!(f, "               (empty trace)")?;
                    }
                    for e in &w.trace {
                        writeln!(f, "               {e}")?;
                    }
                }
            }
        }
        writeln!(
            f,
            "soundness discrepancies: {}  completeness gaps: {} ({} unclassified)",
            self.soundness_discrepancies, self.completeness_gaps, self.unclassified_gaps
        )
    }
}

fn classify(f: &Formula, a: &Architecture, prover: &Prover, oracle: &Oracle) -> (GapKind, String) {
    let has = prover.has_status();
    let element = |v: &VarRef| a.slots_of(v).len() <= 1;
    match f {
        Formula::HasOne { var, .. } if element(var) => {
            (GapKind::SingleSlotHasOne, format!("{var} is a single slot, so at most one value is ever held"))
        }
        Formula::HasAll { component: c, var } => {
            let sampled: Vec<String> = a
                .slots_of(var)
                .into_iter()
                .filter(|s| !has.in_all(c, s) && has.may_obtain(c, s))
                .map(|s| s.to_string())
                .collect();
            if sampled.is_empty() {
                (GapKind::Unclassified, format!("{c} holds {var} in some state without a derivation"))
            } else {
                (GapKind::SpotcheckDisclosure, format!("{c} obtains {} by sampling, outside ALL", sampled.join(", ")))
            }
        }
        Formula::HasNone { component: c, var } | Formula::HasOne { component: c, var } => {
            let phantom: Vec<String> = a
                .slots_of(var)
                .into_iter()
                .filter(|s| has.may_obtain(c, s) && !oracle.ever_defined(c, s))
                .map(|s| s.to_string())
                .collect();
            if phantom.is_empty() {
                (GapKind::Unclassified, format!("no rule bounds what {c} holds of {var}"))
            } else {
                (
                    GapKind::UnrealisableDependency,
                    format!(
                        "Dep licences suggest {c} may obtain {}, but no reachable state defines it",
                        phantom.join(", ")
                    ),
                )
            }
        }
        Formula::Knows { component: c, eqs } | Formula::Believes { component: c, eqs } => {
            if !oracle.has_viable(c) {
                return (GapKind::VacuousKnowledge, format!("every state of {c} is doomed to an error"));
            }
            let Some(ck) = prover.knowledge().of(c) else { return (GapKind::Unclassified, String::new()) };
            let facts = if matches!(f, Formula::Believes { .. }) { ck.believed_ground() } else { ck.known_ground() };
            let goal = expand_all(eqs, a).unwrap_or_default();
            if implies(facts, &goal, a, oracle.interp()) {
                (GapKind::SemanticEntailment, format!("the facts of {c} imply {} only semantically", display_conj(eqs)))
            } else {
                (GapKind::Unclassified, format!("{c} reaches the goal by a route no rule models"))
            }
        }
        _ => (GapKind::Unclassified, String::new()),
    }
}

pub fn crosscheck(
    a: &Architecture,
    goals: &[Formula],
    model: &Model,
    popts: ProverOptions,
    oopts: OracleOptions,
) -> CrosscheckReport {
    let prover = Prover::new(a, popts);
    let oracle = Oracle::new(a, model, oopts);
    let mut rows = Vec::new();
    for f in goals {
        let outcome = prover.prove(f);
        let proved = outcome.is_proved();
        let semantic = oracle.holds(f);
        let (agreement, explanation) = match (proved, semantic.verdict) {
            (true, Verdict::Fails)
                if semantic.exhaustive
                    || f.conjuncts().iter().all(|c| matches!(c, Formula::HasNone { .. } | Formula::HasOne { .. })) =>
            {
                (Agreement::Soundness, None)
            }
            (true, Verdict::Fails) => (Agreement::Inconclusive, None),
            (false, Verdict::Holds) => {
                let (k, why) = classify(f, a, &prover, &oracle);
                (Agreement::CompletenessGap(k), Some(why))
            }
            (false, Verdict::HoldsWithinBounds) => (Agreement::Inconclusive, None),
            _ => (Agreement::Agree, None),
        };
        rows.push(GoalCheck { goal: f.to_string(), proved, prover: outcome, semantic, agreement, explanation });
    }
    let count = |p: &dyn Fn(&Agreement) -> bool| rows.iter().filter(|r| p(&r.agreement)).count();
    CrosscheckReport {
        architecture: a.name.clone(),
        states: oracle.exploration().len(),
        exhaustive: oracle.exploration().exhaustive(),
        soundness_discrepancies: count(&|g| *g == Agreement::Soundness),
        completeness_gaps: count(&|g| matches!(g, Agreement::CompletenessGap(_))),
        unclassified_gaps: count(&|g| *g == Agreement::CompletenessGap(GapKind::Unclassified)),
        goals: rows,
    }
}
