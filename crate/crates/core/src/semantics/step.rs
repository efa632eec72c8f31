//! The event state machine.

use std::collections::BTreeMap;

use super::event::{Assignment, Event, SentStatement};
use super::state::{ComponentState, Configuration, LiveState, ReceiveKey};
use crate::model::*;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum StepError {
    #[error("unknown component `{0}`")]
    UnknownComponent(String),
    #[error("component `{0}` is in the error state")]
    ErrorComponent(String),
    #[error("`{0}` is read before being defined")]
    Undefined(String),
    #[error("statement verified by `{0}` was never received")]
    NotReceived(String),
    #[error("proof snapshot does not match the sender's values")]
    Snapshot,
    #[error(transparent)]
    Eval(#[from] ModelError),
}

fn write(l: &mut LiveState, a: &Architecture, asg: &Assignment) {
    for (s, v) in a.slots_of(&asg.var).into_iter().zip(&asg.values) {
        l.vars.insert(s, *v);
    }
}

fn expand(eqs: &[Equation], a: &Architecture) -> Result<Vec<Equation>, ModelError> {
    expand_all(eqs, a)
}

fn holds_all(
    eqs: &[Equation],
    vs: &impl Valuation,
    interp: &Interpretation,
    a: &Architecture,
) -> Result<bool, ModelError> {
    for e in eqs {
        if eval_eq(e, vs, interp, a)? != Truth::True {
            return Ok(false);
        }
    }
    Ok(true)
}

/// The sender-side values a statement carries: for proofs, the defined slots its direct
/// equations mention.
pub fn snapshot_for(st: &Statement, sender: &ComponentState, a: &Architecture) -> Vec<(Slot, i64)> {
    let Statement::Proof(p) = st else { return Vec::new() };
    let Some(l) = sender.live() else { return Vec::new() };
    let mut snap = BTreeMap::new();
    for e in p.equations() {
        for v in e.var_refs() {
            for s in a.slots_of(&v) {
                if let Some(x) = l.vars.get(&s) {
                    snap.insert(s, *x);
                }
            }
        }
    }
    snap.into_iter().collect()
}

/// Applies one event. Only the owner's state (and trace history) changes.
pub fn step(
    e: &Event,
    cfg: &Configuration,
    a: &Architecture,
    interp: &Interpretation,
) -> Result<Configuration, StepError> {
    let mut next = cfg.clone();
    let owner = e.owner().to_string();
    if let Event::Receive { sender, statements, .. } = e {
        let s = cfg.state.get(sender).ok_or_else(|| StepError::UnknownComponent(sender.clone()))?;
        if statements.iter().any(|st| st.snapshot != snapshot_for(&st.statement, s, a)) {
            return Err(StepError::Snapshot);
        }
    }
    let state = next.state.get_mut(&owner).ok_or_else(|| StepError::UnknownComponent(owner.clone()))?;
    let ComponentState::Live(l) = state else { return Err(StepError::ErrorComponent(owner)) };
    let mut fail = false;
    match e {
        Event::Has { assignment, .. } => write(l, a, assignment),
        Event::Receive { receiver, sender, statements, payload } => {
            for p in payload {
                write(l, a, p);
            }
            next.inbox.entry(receiver.clone()).or_default().extend(statements.iter().cloned());
            next.receives.insert(ReceiveKey {
                receiver: receiver.clone(),
                sender: sender.clone(),
                statements: statements.iter().map(|s| s.statement.clone()).collect(),
                payload: payload.iter().map(|p| p.var.clone()).collect(),
            });
        }
        Event::Compute { eq, .. } => {
            let v = eval_term(&eq.rhs, &l.vars, interp, a)?
                .defined()
                .ok_or_else(|| StepError::Undefined(eq.rhs.to_string()))?;
            let Term::Var(target) = &eq.lhs else { return Err(ModelError::NotGround(eq.to_string()).into()) };
            write(l, a, &Assignment { var: target.clone(), values: vec![v] });
            l.pk.insert(eq.clone());
        }
        Event::Derive { assignment, .. } => {
            write(l, a, assignment);
            next.derives += 1;
        }
        Event::Check { eqs, .. } => {
            if holds_all(eqs, &l.vars, interp, a)? {
                l.pk.extend(expand(eqs, a)?);
            } else {
                fail = true;
            }
        }
        Event::VerifyProof { proof, .. } => {
            let wanted = Statement::Proof(proof.clone());
            let copies: Vec<&SentStatement> =
                cfg.inbox.get(&owner).into_iter().flatten().filter(|s| s.statement == wanted).collect();
            if copies.is_empty() {
                return Err(StepError::NotReceived(owner));
            }
            let direct: Vec<Equation> = expand(&proof.equations().cloned().collect::<Vec<_>>(), a)?;
            let mut ok = false;
            for c in copies {
                let snap: BTreeMap<Slot, i64> = c.snapshot.iter().cloned().collect();
                if holds_all(&direct, &crate::model::Layered { primary: &l.vars, fallback: &snap }, interp, a)? {
                    ok = true;
                    break;
                }
            }
            if ok {
                l.pk.extend(direct);
                for at in proof.attestations().filter(|at| l.trusts.contains(&at.author)) {
                    l.pk.extend(expand(&at.equations, a)?);
                }
            } else {
                fail = true;
            }
        }
        Event::VerifyAttest { attest, .. } => {
            let wanted = Statement::Attest(attest.clone());
            if !cfg.inbox.get(&owner).is_some_and(|b| b.iter().any(|s| s.statement == wanted)) {
                return Err(StepError::NotReceived(owner));
            }
            if l.trusts.contains(&attest.author) {
                l.pk.extend(expand(&attest.equations, a)?);
            }
        }
        Event::Spotcheck { checker, source, array, index, value, eqs } => {
            l.vars.insert(Slot::elem(array.clone(), *index), *value);
            next.spotchecks.insert((checker.clone(), source.clone(), array.clone()));
            let k = spot_index_var(array, eqs).unwrap_or_default();
            let inst: Vec<Equation> = eqs.iter().map(|e| e.substitute_index(&k, *index)).collect();
            if holds_all(&inst, &l.vars, interp, a)? {
                l.pb.extend(expand(eqs, a)?);
            } else {
                fail = true;
            }
        }
    }
    if fail {
        *state = ComponentState::Error;
    }
    Ok(next)
}

/// The index variable a spotcheck's equations use for the sampled array.
pub fn spot_index_var(array: &str, eqs: &[Equation]) -> Option<String> {
    eqs.iter()
        .flat_map(|e| e.var_refs())
        .find(|v| v.name == array && v.index_var().is_some())
        .and_then(|v| v.index_var().map(String::from))
}
