//! Events that may extend a configuration.

use super::compat::{ground_deps, own_slots, templates, Template};
use super::event::{Assignment, Event, SentStatement};
use super::state::{ComponentState, Configuration};
use super::step::{snapshot_for, spot_index_var};
use crate::model::*;

/// Precomputed per-architecture data for successor enumeration.
#[derive(Clone, Debug)]
pub struct EventSpace {
    arch: Architecture,
    templates: Vec<Template>,
    derives: Vec<(ComponentId, VarRef, Vec<VarRef>)>,
    values: Vec<i64>,
    max_derives: Option<usize>,
}

fn tuples(values: &[i64], n: usize) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut p = p.clone();
                    p.push(*v);
                    p
                })
            })
            .collect();
    }
    out
}

fn split(values: &[i64], sizes: &[usize]) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    let mut at = 0;
    for n in sizes {
        out.push(values[at..at + n].to_vec());
        at += n;
    }
    out
}

impl EventSpace {
    pub fn new(a: &Architecture, interp: &Interpretation, bounds: &EnumBounds) -> Self {
        let mut values: Vec<i64> = interp.domain().collect();
        if let Some(cap) = bounds.value_cap {
            values.truncate(cap.max(1));
        }
        let mut derives = Vec::new();
        for c in &a.components {
            let own = own_slots(a, c);
            for (t, s) in ground_deps(a, c) {
                if a.slots_of(&t).iter().all(|x| !own.contains(x)) {
                    derives.push((c.clone(), t, s));
                }
            }
        }
        EventSpace { arch: a.clone(), templates: templates(a), derives, values, max_derives: bounds.max_adversarial }
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    /// Whether the derive cap stops a derive that would otherwise be enabled.
    pub fn derive_capped(&self, cfg: &Configuration) -> bool {
        self.max_derives.is_some_and(|m| cfg.derives >= m) && !self.derive_events(cfg, true).is_empty()
    }

    fn derive_events(&self, cfg: &Configuration, ignore_cap: bool) -> Vec<Event> {
        let a = &self.arch;
        let mut out = Vec::new();
        if !ignore_cap && self.max_derives.is_some_and(|m| cfg.derives >= m) {
            return out;
        }
        for (c, t, s) in &self.derives {
            let Some(ComponentState::Live(l)) = cfg.state.get(c) else { continue };
            let targets = a.slots_of(t);
            if targets.iter().any(|x| l.vars.contains_key(x)) {
                continue;
            }
            if !s.iter().flat_map(|v| a.slots_of(v)).all(|x| l.vars.contains_key(&x)) {
                continue;
            }
            for vs in tuples(&self.values, targets.len()) {
                out.push(Event::Derive {
                    owner: c.clone(),
                    sources: s.clone(),
                    assignment: Assignment { var: t.clone(), values: vs },
                });
            }
        }
        out
    }

    /// Every event whose occurrence keeps the trace consistent. Computations whose
    /// evaluation fails under the interpretation are left out.
    pub fn enabled(&self, cfg: &Configuration, interp: &Interpretation) -> Vec<Event> {
        let a = &self.arch;
        let mut out = Vec::new();
        let live = |c: &str| match cfg.state.get(c) {
            Some(ComponentState::Live(l)) => Some(l),
            _ => None,
        };
        let defined = |l: &super::state::LiveState, slots: &[Slot]| slots.iter().all(|s| l.vars.contains_key(s));
        let free = |l: &super::state::LiveState, slots: &[Slot]| slots.iter().all(|s| !l.vars.contains_key(s));
        let eq_slots = |eqs: &[Equation]| -> Vec<Slot> {
            eqs.iter().flat_map(|e| e.var_refs()).flat_map(|v| a.slots_of(&v)).collect()
        };
        for t in &self.templates {
            match t {
                Template::Has { owner, var } => {
                    let Some(l) = live(owner) else { continue };
                    let slots = a.slots_of(var);
                    if !free(l, &slots) {
                        continue;
                    }
                    for vs in tuples(&self.values, slots.len()) {
                        out.push(Event::Has {
                            owner: owner.clone(),
                            assignment: Assignment { var: var.clone(), values: vs },
                        });
                    }
                }
                Template::Receive(k) => {
                    let Some(l) = live(&k.receiver) else { continue };
                    if cfg.receives.contains(k) {
                        continue;
                    }
                    let sizes: Vec<usize> = k.payload.iter().map(|v| a.slots_of(v).len()).collect();
                    let slots: Vec<Slot> = k.payload.iter().flat_map(|v| a.slots_of(v)).collect();
                    if !free(l, &slots) {
                        continue;
                    }
                    let Some(sender) = cfg.state.get(&k.sender) else { continue };
                    let statements: Vec<SentStatement> = k
                        .statements
                        .iter()
                        .map(|s| SentStatement { statement: s.clone(), snapshot: snapshot_for(s, sender, a) })
                        .collect();
                    for vs in tuples(&self.values, slots.len()) {
                        let payload = k
                            .payload
                            .iter()
                            .zip(split(&vs, &sizes))
                            .map(|(v, values)| Assignment { var: v.clone(), values })
                            .collect();
                        out.push(Event::Receive {
                            receiver: k.receiver.clone(),
                            sender: k.sender.clone(),
                            statements: statements.clone(),
                            payload,
                        });
                    }
                }
                Template::Compute { owner, eq } => {
                    let Some(l) = live(owner) else { continue };
                    let Term::Var(target) = &eq.lhs else { continue };
                    if !free(l, &a.slots_of(target)) {
                        continue;
                    }
                    if matches!(eval_term(&eq.rhs, &l.vars, interp, a), Ok(Value::Defined(_))) {
                        out.push(Event::Compute { owner: owner.clone(), eq: eq.clone() });
                    }
                }
                Template::Check { owner, eqs } => {
                    let Some(l) = live(owner) else { continue };
                    if defined(l, &eq_slots(eqs)) && eqs.iter().all(|e| eval_eq(e, &l.vars, interp, a).is_ok()) {
                        out.push(Event::Check { owner: owner.clone(), eqs: eqs.clone() });
                    }
                }
                Template::VerifyProof { owner, proof } => {
                    if live(owner).is_none() {
                        continue;
                    }
                    let st = Statement::Proof(proof.clone());
                    if cfg.inbox.get(owner).is_some_and(|b| b.iter().any(|s| s.statement == st)) {
                        out.push(Event::VerifyProof { owner: owner.clone(), proof: proof.clone() });
                    }
                }
                Template::VerifyAttest { owner, attest } => {
                    if live(owner).is_none() {
                        continue;
                    }
                    let st = Statement::Attest(attest.clone());
                    if cfg.inbox.get(owner).is_some_and(|b| b.iter().any(|s| s.statement == st)) {
                        out.push(Event::VerifyAttest { owner: owner.clone(), attest: attest.clone() });
                    }
                }
                Template::Spotcheck { checker, source, array, eqs, .. } => {
                    let Some(l) = live(checker) else { continue };
                    if cfg.spotchecks.contains(&(checker.clone(), source.clone(), array.clone())) {
                        continue;
                    }
                    let k = spot_index_var(array, eqs).unwrap_or_default();
                    for ck in 0..a.range_of(array).unwrap_or(0) {
                        let at = Slot::elem(array.clone(), ck);
                        if l.vars.contains_key(&at) {
                            continue;
                        }
                        let inst: Vec<Equation> = eqs.iter().map(|e| e.substitute_index(&k, ck)).collect();
                        let others: Vec<Slot> = eq_slots(&inst).into_iter().filter(|s| *s != at).collect();
                        if !defined(l, &others) {
                            continue;
                        }
                        for v in &self.values {
                            let mut vars = l.vars.clone();
                            vars.insert(at.clone(), *v);
                            if inst.iter().any(|e| eval_eq(e, &vars, interp, a).is_err()) {
                                continue;
                            }
                            out.push(Event::Spotcheck {
                                checker: checker.clone(),
                                source: source.clone(),
                                array: array.clone(),
                                index: ck,
                                value: *v,
                                eqs: eqs.clone(),
                            });
                        }
                    }
                }
            }
        }
        out.extend(self.derive_events(cfg, false));
        out
    }
}
