//! Bounded semantic checking of goals and cross-validation of the prover.
//!
//! Possession goals quantify over every reachable state. Knowledge and belief goals ask that
//! from every viable state where the component is not in error, a state is reachable whose
//! known (resp. known and believed) equations, closed under the component's deduction rules,
//! imply the goal. A state is viable when some continuation brings the component to a
//! non-error state in which none of its enabled events would change what it observes.

mod crosscheck;
mod explore;
mod family;
mod imply;

pub use crosscheck::{crosscheck, Agreement, CrosscheckReport, GapKind, GoalCheck};
pub use explore::{explore, Exploration};
pub use family::formula_family;
pub use imply::{implies, MAX_VALUATIONS};

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::model::*;
use crate::prover::{close, DeductionBudget};
use crate::semantics::{trace_to_jsonl, ComponentState, Configuration, Event};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KnowledgeReading {
    /// Quantify only over states from which the component can still complete without error.
    #[default]
    Viable,
    /// Quantify over every non-error state.
    Literal,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleOptions {
    pub budget: DeductionBudget,
    pub reading: KnowledgeReading,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Holds,
    Fails,
    HoldsWithinBounds,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub note: String,
    pub trace: Vec<Event>,
}

impl Witness {
    pub fn jsonl(&self) -> String {
        trace_to_jsonl(&self.trace)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemanticVerdict {
    pub formula: String,
    pub verdict: Verdict,
    /// False when a bound truncated the exploration.
    pub exhaustive: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl SemanticVerdict {
    pub fn holds(&self) -> bool {
        self.verdict != Verdict::Fails
    }
}

/// Semantic checker over one exploration of an architecture.
pub struct Oracle {
    arch: Architecture,
    interp: Interpretation,
    opts: OracleOptions,
    exp: Exploration,
    pred: Vec<Vec<u32>>,
    /// Per component: interned closures of known, and of known plus believed, equations.
    closures: RefCell<HashMap<(usize, Vec<Equation>), usize>>,
    closure_facts: RefCell<Vec<Vec<Equation>>>,
}

fn witness(exp: &Exploration, id: usize, note: String) -> Witness {
    Witness { note, trace: exp.trace_to(id) }
}

impl Oracle {
    pub fn new(a: &Architecture, model: &Model, opts: OracleOptions) -> Self {
        let exp = explore(a, model);
        let pred = exp.predecessors();
        Oracle {
            arch: a.clone(),
            interp: model.interp.clone(),
            opts,
            exp,
            pred,
            closures: RefCell::new(HashMap::new()),
            closure_facts: RefCell::new(Vec::new()),
        }
    }

    pub fn interp(&self) -> &Interpretation {
        &self.interp
    }

    /// Whether `c` holds a value for `s` in some reachable state.
    pub fn ever_defined(&self, c: &str, s: &Slot) -> bool {
        self.exp.configs.iter().any(|cfg| cfg.state.get(c).and_then(|st| st.value(s)).is_some())
    }

    /// Whether some reachable state lets `c` settle without error.
    pub fn has_viable(&self, c: &str) -> bool {
        let Some(ci) = self.arch.component_index(c) else { return false };
        self.exp
            .configs
            .iter()
            .enumerate()
            .any(|(id, cfg)| cfg.state.get(c).is_some_and(|s| !s.is_error()) && self.exp.complete[id][ci])
    }

    pub fn exploration(&self) -> &Exploration {
        &self.exp
    }

    fn verdict(&self, f: &Formula, fails: Option<Witness>) -> SemanticVerdict {
        let exhaustive = self.exp.exhaustive();
        let verdict = match (&fails, exhaustive) {
            (Some(_), _) => Verdict::Fails,
            (None, true) => Verdict::Holds,
            (None, false) => Verdict::HoldsWithinBounds,
        };
        SemanticVerdict { formula: f.to_string(), verdict, exhaustive, witness: fails }
    }

    fn defined(&self, cfg: &Configuration, c: &str, v: &VarRef) -> Vec<(Slot, Option<i64>)> {
        let st = cfg.state.get(c);
        self.arch
            .slots_of(v)
            .into_iter()
            .map(|s| {
                let x = st.and_then(|st| st.value(&s));
                (s, x)
            })
            .collect()
    }

    pub fn holds(&self, f: &Formula) -> SemanticVerdict {
        let exp = &self.exp;
        match f {
            Formula::HasAll { component: c, var } => {
                let mut best = (0, 0);
                for (id, cfg) in exp.configs.iter().enumerate() {
                    let d = self.defined(cfg, c, var);
                    let n = d.iter().filter(|(_, x)| x.is_some()).count();
                    if n == d.len() {
                        return self.verdict(f, None);
                    }
                    if n > best.0 {
                        best = (n, id);
                    }
                }
                let note =
                    format!("no reachable state defines all of {var} for {c}; the trace reaches the most ({})", best.0);
                self.verdict(f, Some(witness(exp, best.1, note)))
            }
            Formula::HasNone { component: c, var } | Formula::HasOne { component: c, var } => {
                let limit = if matches!(f, Formula::HasNone { .. }) { 0 } else { 1 };
                for (id, cfg) in exp.configs.iter().enumerate() {
                    let got: Vec<String> = self
                        .defined(cfg, c, var)
                        .into_iter()
                        .filter_map(|(s, x)| x.map(|x| format!("{s}={x}")))
                        .collect();
                    if got.len() > limit {
                        let note = format!("{c} holds {}", got.join(", "));
                        return self.verdict(f, Some(witness(exp, id, note)));
                    }
                }
                self.verdict(f, None)
            }
            Formula::Knows { component: c, eqs } | Formula::Believes { component: c, eqs } => {
                let believe = matches!(f, Formula::Believes { .. });
                self.epistemic(f, c, eqs, believe)
            }
            Formula::And(l, r) => {
                let (vl, vr) = (self.holds(l), self.holds(r));
                let fails =
                    [&vl, &vr].into_iter().find_map(|v| v.witness.clone().filter(|_| v.verdict == Verdict::Fails));
                self.verdict(f, fails)
            }
        }
    }

    fn closure_id(&self, ci: usize, c: &str, facts: Vec<Equation>) -> usize {
        if let Some(&id) = self.closures.borrow().get(&(ci, facts.clone())) {
            return id;
        }
        let rules: Vec<&DeductionRule> = self.arch.rules_of(c).collect();
        let closed = close(&facts, &rules, self.opts.budget).facts;
        let mut store = self.closure_facts.borrow_mut();
        let id = store.len();
        store.push(closed);
        self.closures.borrow_mut().insert((ci, facts), id);
        id
    }

    fn epistemic(&self, f: &Formula, c: &str, eqs: &[Equation], believe: bool) -> SemanticVerdict {
        let exp = &self.exp;
        let Some(ci) = self.arch.component_index(c) else { return self.verdict(f, None) };
        let goal = match expand_all(eqs, &self.arch) {
            Ok(g) => g,
            Err(e) => {
                return self
                    .verdict(f, Some(Witness { note: format!("goal cannot be expanded: {e}"), trace: Vec::new() }))
            }
        };
        let n = exp.len();
        let mut live = vec![false; n];
        let mut good = vec![false; n];
        let mut verdicts: HashMap<usize, bool> = HashMap::new();
        for (id, cfg) in exp.configs.iter().enumerate() {
            let Some(ComponentState::Live(l)) = cfg.state.get(c) else { continue };
            live[id] = true;
            let mut facts: BTreeSet<Equation> = l.pk.clone();
            if believe {
                facts.extend(l.pb.iter().cloned());
            }
            let cid = self.closure_id(ci, c, facts.into_iter().collect());
            good[id] = *verdicts
                .entry(cid)
                .or_insert_with(|| implies(&self.closure_facts.borrow()[cid], &goal, &self.arch, &self.interp));
        }
        let reach_good = exp.can_reach(&self.pred, &good);
        let viable = match self.opts.reading {
            KnowledgeReading::Literal => live.clone(),
            KnowledgeReading::Viable => {
                let settled: Vec<bool> = (0..n).map(|id| live[id] && exp.complete[id][ci]).collect();
                exp.can_reach(&self.pred, &settled)
            }
        };
        let bad = (0..n).find(|&id| live[id] && viable[id] && !reach_good[id]);
        let fails = bad.map(|id| {
            let m = if believe { "known or believed" } else { "known" };
            let at = if id == 0 { "the initial state" } else { "the state after the witness trace" };
            witness(exp, id, format!("from {at}, no continuation gives {c} {m} equations implying the goal"))
        });
        self.verdict(f, fails)
    }
}

/// One-shot semantic check.
pub fn holds(a: &Architecture, f: &Formula, model: &Model, opts: OracleOptions) -> SemanticVerdict {
    Oracle::new(a, model, opts).holds(f)
}

#[cfg(test)]
mod tests;
