//! Ground instances of architecture relations and event compatibility.

use std::collections::{BTreeMap, BTreeSet};

use super::event::Event;
use super::state::ReceiveKey;
use crate::model::*;

/// A relation with every index variable outside property positions instantiated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Template {
    Has { owner: ComponentId, var: VarRef },
    Receive(ReceiveKey),
    Compute { owner: ComponentId, eq: Equation },
    Check { owner: ComponentId, eqs: Vec<Equation> },
    VerifyProof { owner: ComponentId, proof: ProofStatement },
    VerifyAttest { owner: ComponentId, attest: Attestation },
    Spotcheck { checker: ComponentId, source: ComponentId, array: String, index: String, eqs: Vec<Equation> },
}

fn index_vars_of(refs: &[VarRef]) -> BTreeSet<String> {
    refs.iter().filter_map(|v| v.index_var().map(String::from)).collect()
}

/// Every assignment of the index variables `ks`, each ranging over the smallest array it indexes.
fn assignments(ks: &BTreeSet<String>, refs: &[VarRef], a: &Architecture) -> Vec<BTreeMap<String, usize>> {
    let mut out = vec![BTreeMap::new()];
    for k in ks {
        let range = refs
            .iter()
            .filter(|v| v.index_var() == Some(k.as_str()))
            .filter_map(|v| a.range_of(&v.name))
            .min()
            .unwrap_or(0);
        out = out
            .into_iter()
            .flat_map(|m| {
                (0..range).map(move |c| {
                    let mut m = m.clone();
                    m.insert(k.clone(), c);
                    m
                })
            })
            .collect();
    }
    out
}

fn subst_ref(v: &VarRef, m: &BTreeMap<String, usize>) -> VarRef {
    m.iter().fold(v.clone(), |v, (k, c)| v.substitute(k, *c))
}

fn subst_eq(e: &Equation, m: &BTreeMap<String, usize>) -> Equation {
    m.iter().fold(e.clone(), |e, (k, c)| e.substitute_index(k, *c))
}

pub fn templates_of(r: &Relation, a: &Architecture) -> Vec<Template> {
    match r {
        Relation::Has { owner, var } => {
            let refs = std::slice::from_ref(var);
            assignments(&index_vars_of(refs), refs, a)
                .iter()
                .map(|m| Template::Has { owner: owner.clone(), var: subst_ref(var, m) })
                .collect()
        }
        Relation::Receive { receiver, sender, statements, payload } => assignments(&index_vars_of(payload), payload, a)
            .iter()
            .map(|m| {
                Template::Receive(ReceiveKey {
                    receiver: receiver.clone(),
                    sender: sender.clone(),
                    statements: statements.clone(),
                    payload: payload.iter().map(|v| subst_ref(v, m)).collect(),
                })
            })
            .collect(),
        Relation::Compute { owner, eq } => {
            let refs = eq.var_refs();
            assignments(&eq.index_vars(), &refs, a)
                .iter()
                .map(|m| Template::Compute { owner: owner.clone(), eq: subst_eq(eq, m) })
                .collect()
        }
        Relation::Check { owner, eqs } => {
            let refs: Vec<VarRef> = eqs.iter().flat_map(|e| e.var_refs()).collect();
            let ks: BTreeSet<String> = eqs.iter().flat_map(|e| e.index_vars()).collect();
            assignments(&ks, &refs, a)
                .iter()
                .map(|m| Template::Check { owner: owner.clone(), eqs: eqs.iter().map(|e| subst_eq(e, m)).collect() })
                .collect()
        }
        Relation::VerifyProof { owner, proof } => {
            vec![Template::VerifyProof { owner: owner.clone(), proof: proof.clone() }]
        }
        Relation::VerifyAttest { owner, attest } => {
            vec![Template::VerifyAttest { owner: owner.clone(), attest: attest.clone() }]
        }
        Relation::Spotcheck { checker, source, array, index, eqs } => vec![Template::Spotcheck {
            checker: checker.clone(),
            source: source.clone(),
            array: array.clone(),
            index: index.clone(),
            eqs: eqs.clone(),
        }],
        Relation::Trust { .. } => Vec::new(),
    }
}

pub fn templates(a: &Architecture) -> Vec<Template> {
    a.relations.iter().flat_map(|r| templates_of(r, a)).collect()
}

fn sized(a: &Architecture, v: &VarRef, values: &[i64]) -> bool {
    a.slots_of(v).len() == values.len()
}

pub fn matches_template(e: &Event, t: &Template, a: &Architecture) -> bool {
    match (e, t) {
        (Event::Has { owner, assignment }, Template::Has { owner: o, var }) => {
            owner == o && &assignment.var == var && sized(a, var, &assignment.values)
        }
        (Event::Receive { receiver, sender, statements, payload }, Template::Receive(k)) => {
            receiver == &k.receiver
                && sender == &k.sender
                && statements.len() == k.statements.len()
                && statements.iter().zip(&k.statements).all(|(s, t)| &s.statement == t)
                && payload.len() == k.payload.len()
                && payload.iter().zip(&k.payload).all(|(p, v)| &p.var == v && sized(a, v, &p.values))
        }
        (Event::Compute { owner, eq }, Template::Compute { owner: o, eq: q }) => owner == o && eq == q,
        (Event::Check { owner, eqs }, Template::Check { owner: o, eqs: q }) => owner == o && eqs == q,
        (Event::VerifyProof { owner, proof }, Template::VerifyProof { owner: o, proof: p }) => owner == o && proof == p,
        (Event::VerifyAttest { owner, attest }, Template::VerifyAttest { owner: o, attest: p }) => {
            owner == o && attest == p
        }
        (
            Event::Spotcheck { checker, source, array, index, eqs, .. },
            Template::Spotcheck { checker: c, source: s, array: x, eqs: q, .. },
        ) => checker == c && source == s && array == x && eqs == q && a.range_of(array).is_some_and(|r| *index < r),
        _ => false,
    }
}

/// Whether `e` instantiates `r` (values are unconstrained).
pub fn compatible_event(e: &Event, r: &Relation, a: &Architecture) -> bool {
    templates_of(r, a).iter().any(|t| matches_template(e, t, a))
}

/// Ground Dep entries of `c` as (target, sources).
pub fn ground_deps(a: &Architecture, c: &str) -> Vec<(VarRef, Vec<VarRef>)> {
    let mut out = Vec::new();
    for d in a.deps_of(c) {
        let refs: Vec<VarRef> = std::iter::once(d.target.clone()).chain(d.sources.iter().cloned()).collect();
        for m in assignments(&index_vars_of(&refs), &refs, a) {
            out.push((subst_ref(&d.target, &m), d.sources.iter().map(|s| subst_ref(s, &m)).collect()));
        }
    }
    out
}

/// Slots `c` writes through its own has, receive and compute relations; derive events may not
/// target them.
pub fn own_slots(a: &Architecture, c: &str) -> BTreeSet<Slot> {
    let mut out = BTreeSet::new();
    for r in a.relations.iter().filter(|r| r.owner() == c) {
        match r {
            Relation::Has { var, .. } => out.extend(a.slots_of(var)),
            Relation::Receive { payload, .. } => payload.iter().for_each(|v| out.extend(a.slots_of(v))),
            Relation::Compute { .. } => {
                if let Some(v) = r.compute_target() {
                    out.extend(a.slots_of(v));
                }
            }
            _ => {}
        }
    }
    out
}

/// Whether a derive event is licensed by a Dep entry of its owner.
pub fn derive_licensed(e: &Event, a: &Architecture) -> bool {
    let Event::Derive { owner, sources, assignment } = e else { return false };
    sized(a, &assignment.var, &assignment.values)
        && ground_deps(a, owner).iter().any(|(t, s)| t == &assignment.var && s == sources)
}
