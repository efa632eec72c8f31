//! Trace consistency and execution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use super::compat::{derive_licensed, matches_template, own_slots, templates, Template};
use super::event::Event;
use super::state::{Configuration, GlobalState};
use super::step::{spot_index_var, step, StepError};
use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// (i) The event instantiates no relation of the architecture.
    Incompatible,
    /// (ii) An out-of-architecture computation without a Dep licence.
    UnlicensedDerive,
    /// (iii) A second spotcheck for the same checker, source and array.
    RepeatedSpotcheck,
    /// (iv) A slot written twice.
    Reassignment,
    /// (v) An event of a component already in the error state.
    AfterError,
    /// (vi) A variable or statement used before it is available.
    UseBeforeDefinition,
}

impl ViolationKind {
    pub fn code(self) -> &'static str {
        match self {
            ViolationKind::Incompatible => "i",
            ViolationKind::UnlicensedDerive => "ii",
            ViolationKind::RepeatedSpotcheck => "iii",
            ViolationKind::Reassignment => "iv",
            ViolationKind::AfterError => "v",
            ViolationKind::UseBeforeDefinition => "vi",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub position: usize,
    pub kind: ViolationKind,
    pub message: String,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "event {}: ({}) {}", self.position, self.kind.code(), self.message)
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum TraceError {
    #[error("inconsistent trace: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Inconsistent(Vec<Violation>),
    #[error("event {position}: {source}")]
    Step {
        position: usize,
        #[source]
        source: StepError,
    },
}

fn slots_read(e: &Event, a: &Architecture) -> Vec<Slot> {
    let from = |eqs: &[Equation]| -> Vec<Slot> {
        eqs.iter().flat_map(|q| q.var_refs()).flat_map(|v| a.slots_of(&v)).collect()
    };
    match e {
        Event::Compute { eq, .. } => {
            let mut refs = Vec::new();
            eq.rhs.var_refs(&mut refs);
            refs.iter().flat_map(|v| a.slots_of(v)).collect()
        }
        Event::Check { eqs, .. } => from(eqs),
        Event::Derive { sources, .. } => sources.iter().flat_map(|v| a.slots_of(v)).collect(),
        Event::Spotcheck { array, index, eqs, .. } => {
            let k = spot_index_var(array, eqs).unwrap_or_default();
            let inst: Vec<Equation> = eqs.iter().map(|q| q.substitute_index(&k, *index)).collect();
            from(&inst).into_iter().filter(|s| &s.var != array || s.index != Some(*index)).collect()
        }
        _ => Vec::new(),
    }
}

fn slots_written(e: &Event, a: &Architecture) -> Vec<Slot> {
    match e {
        Event::Has { assignment, .. } | Event::Derive { assignment, .. } => a.slots_of(&assignment.var),
        Event::Receive { payload, .. } => payload.iter().flat_map(|p| a.slots_of(&p.var)).collect(),
        Event::Compute { eq, .. } => match &eq.lhs {
            Term::Var(v) => a.slots_of(v),
            _ => Vec::new(),
        },
        Event::Spotcheck { array, index, .. } => vec![Slot::elem(array.clone(), *index)],
        _ => Vec::new(),
    }
}

/// Structural consistency of a trace: conditions (i)–(iv) and (vi). Condition (v) depends on
/// values and is checked by [`run_trace`].
pub fn check_trace(t: &[Event], a: &Architecture) -> Result<(), Vec<Violation>> {
    let temps: Vec<Template> = templates(a);
    let mut defined: BTreeMap<&str, BTreeSet<Slot>> = BTreeMap::new();
    let mut received: BTreeMap<&str, BTreeSet<&Statement>> = BTreeMap::new();
    let mut receive_keys = BTreeSet::new();
    let mut spot = BTreeSet::new();
    let mut out = Vec::new();
    for (pos, e) in t.iter().enumerate() {
        let mut v = |kind, message: String| out.push(Violation { position: pos, kind, message });
        let owner = e.owner();
        if let Event::Derive { assignment, .. } = e {
            if !derive_licensed(e, a) {
                v(
                    ViolationKind::UnlicensedDerive,
                    format!("no Dep entry of {owner} licenses deriving {}", assignment.var),
                );
            } else if own_slots(a, owner).iter().any(|s| a.slots_of(&assignment.var).contains(s)) {
                v(
                    ViolationKind::UnlicensedDerive,
                    format!("{owner} obtains {} through the architecture", assignment.var),
                );
            }
        } else if !temps.iter().any(|tp| matches_template(e, tp, a)) {
            v(ViolationKind::Incompatible, format!("{e} instantiates no relation"));
        }
        if let Event::Receive { receiver, sender, statements, payload } = e {
            let key = (
                receiver,
                sender,
                statements.iter().map(|s| &s.statement).collect::<Vec<_>>(),
                payload.iter().map(|p| &p.var).collect::<Vec<_>>(),
            );
            if !receive_keys.insert(key) {
                v(ViolationKind::Incompatible, format!("{e} repeats a receive"));
            }
        }
        if let Event::Spotcheck { checker, source, array, .. } = e {
            if !spot.insert((checker, source, array)) {
                v(ViolationKind::RepeatedSpotcheck, format!("{checker} already spot-checked {array} on {source}"));
            }
        }
        let def = defined.entry(owner).or_default();
        for s in slots_read(e, a) {
            if !def.contains(&s) {
                v(ViolationKind::UseBeforeDefinition, format!("{owner} reads {s} before it is defined"));
            }
        }
        let stmt = match e {
            Event::VerifyProof { proof, .. } => Some(Statement::Proof(proof.clone())),
            Event::VerifyAttest { attest, .. } => Some(Statement::Attest(attest.clone())),
            _ => None,
        };
        if let Some(st) = stmt {
            if !received.get(owner).is_some_and(|r| r.contains(&st)) {
                v(ViolationKind::UseBeforeDefinition, format!("{owner} verifies a statement it has not received"));
            }
        }
        for s in slots_written(e, a) {
            if !def.insert(s.clone()) {
                v(ViolationKind::Reassignment, format!("{owner} sets {s} twice"));
            }
        }
        if let Event::Receive { receiver, statements, .. } = e {
            received.entry(receiver).or_default().extend(statements.iter().map(|s| &s.statement));
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// Runs a consistent trace from the initial configuration.
pub fn run_trace_config(t: &[Event], a: &Architecture, interp: &Interpretation) -> Result<Configuration, TraceError> {
    check_trace(t, a).map_err(TraceError::Inconsistent)?;
    let mut cfg = Configuration::initial(a);
    for (position, e) in t.iter().enumerate() {
        if cfg.state.get(e.owner()).is_some_and(|s| s.is_error()) {
            return Err(TraceError::Inconsistent(vec![Violation {
                position,
                kind: ViolationKind::AfterError,
                message: format!("{} has stopped after an error", e.owner()),
            }]));
        }
        cfg = step(e, &cfg, a, interp).map_err(|source| TraceError::Step { position, source })?;
    }
    Ok(cfg)
}

pub fn run_trace(t: &[Event], a: &Architecture, interp: &Interpretation) -> Result<GlobalState, TraceError> {
    run_trace_config(t, a, interp).map(|c| c.state)
}
