//! Architecture consistency conditions C1–C6.
//!
//! * C1 single source: each variable slot is introduced by at most one `has`/`compute`.
//! * C2 single receive source: a receiver gets each variable from one sender, through one
//!   `receive`, and never receives a variable it introduces itself.
//! * C3 input availability: inputs of every `compute`/`check` are obtainable by the owner
//!   through `has`, `receive` payloads or (acyclic) own computations.
//! * C4 verifiable statements: verified statements are received by the verifier.
//! * C5 spotcheck source: the source introduces the array, the checker can read the other
//!   variables of the checked equations, and neither obtains nor derives the array otherwise.
//! * C6 trust: no self-trust.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::*;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum CheckId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
}

impl CheckId {
    pub const ALL: [CheckId; 6] = [CheckId::C1, CheckId::C2, CheckId::C3, CheckId::C4, CheckId::C5, CheckId::C6];

    pub fn title(self) -> &'static str {
        match self {
            CheckId::C1 => "single source of truth",
            CheckId::C2 => "single receive source",
            CheckId::C3 => "input availability",
            CheckId::C4 => "verifiable statements",
            CheckId::C5 => "spotcheck source",
            CheckId::C6 => "trust well-formedness",
        }
    }
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CheckEntry {
    pub check: CheckId,
    pub status: Status,
    pub relations: Vec<String>,
    pub message: String,
}

/// One `pass` entry per satisfied check, one `fail` entry per violation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub entries: Vec<CheckEntry>,
}

impl ConsistencyReport {
    pub fn is_pass(&self) -> bool {
        self.entries.iter().all(|e| e.status == Status::Pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckEntry> {
        self.entries.iter().filter(|e| e.status == Status::Fail)
    }

    pub fn failed(&self, id: CheckId) -> bool {
        self.failures().any(|e| e.check == id)
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            match e.status {
                Status::Pass => writeln!(f, "{} pass  {}", e.check, e.check.title())?,
                Status::Fail => {
                    writeln!(f, "{} FAIL  {}: {}", e.check, e.check.title(), e.message)?;
                    for r in &e.relations {
                        writeln!(f, "        {r}")?;
                    }
                }
            }
        }
        Ok(())
    }
}

/// Slots a component can obtain through `has`, `receive` payloads and its own computations
/// whose inputs are themselves obtainable. Cyclic computations never become obtainable.
pub fn obtainable(a: &Architecture, c: &str) -> BTreeSet<Slot> {
    let mut got: BTreeSet<Slot> = BTreeSet::new();
    for r in a.relations.iter().filter(|r| r.owner() == c) {
        match r {
            Relation::Has { var, .. } => got.extend(a.slots_of(var)),
            Relation::Receive { payload, .. } => payload.iter().for_each(|v| got.extend(a.slots_of(v))),
            _ => {}
        }
    }
    let computes: Vec<(Vec<Slot>, Vec<Slot>)> = a
        .relations
        .iter()
        .filter(|r| r.owner() == c)
        .filter_map(|r| match r {
            Relation::Compute { eq, .. } => {
                let target = a.slots_of(r.compute_target()?);
                let inputs = eq.rhs.clone();
                let mut refs = Vec::new();
                inputs.var_refs(&mut refs);
                Some((target, refs.iter().flat_map(|v| a.slots_of(v)).collect()))
            }
            _ => None,
        })
        .collect();
    loop {
        let before = got.len();
        for (target, inputs) in &computes {
            if inputs.iter().all(|s| got.contains(s)) {
                got.extend(target.iter().cloned());
            }
        }
        if got.len() == before {
            return got;
        }
    }
}

/// Dep entries of `c` instantiated over their index range, as (target slots, source slots).
pub fn ground_deps(a: &Architecture, c: &str) -> Vec<(Vec<Slot>, Vec<Slot>)> {
    let mut out = Vec::new();
    for d in a.deps_of(c) {
        match d.index_var() {
            None => out.push(dep_slots(a, d)),
            Some(k) => {
                let range = std::iter::once(&d.target)
                    .chain(&d.sources)
                    .filter(|v| v.index_var() == Some(k))
                    .filter_map(|v| a.range_of(&v.name))
                    .min()
                    .unwrap_or(0);
                for ck in 0..range {
                    out.push(dep_slots(a, &d.instantiate(k, ck)));
                }
            }
        }
    }
    out
}

fn dep_slots(a: &Architecture, d: &DepEntry) -> (Vec<Slot>, Vec<Slot>) {
    (a.slots_of(&d.target), d.sources.iter().flat_map(|v| a.slots_of(v)).collect())
}

fn eq_slots(a: &Architecture, eqs: &[Equation]) -> BTreeSet<Slot> {
    eqs.iter().flat_map(|e| e.var_refs()).flat_map(|v| a.slots_of(&v)).collect()
}

/// Slots introduced (has/compute) by a relation.
fn introduced(a: &Architecture, r: &Relation) -> Vec<Slot> {
    match r {
        Relation::Has { var, .. } => a.slots_of(var),
        Relation::Compute { .. } => r.compute_target().map(|v| a.slots_of(v)).unwrap_or_default(),
        _ => Vec::new(),
    }
}

fn fmt_slots(s: &BTreeSet<Slot>) -> String {
    s.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ")
}

pub fn check_architecture(a: &Architecture) -> ConsistencyReport {
    let mut fails: Vec<CheckEntry> = Vec::new();
    let mut fail = |check, relations: Vec<&Relation>, message: String| {
        let mut relations: Vec<String> = relations.iter().map(|r| r.to_string()).collect();
        relations.sort();
        fails.push(CheckEntry { check, status: Status::Fail, relations, message });
    };
    let rels = &a.relations;

    // C1
    for (i, r) in rels.iter().enumerate() {
        let mine: BTreeSet<Slot> = introduced(a, r).into_iter().collect();
        for r2 in &rels[i + 1..] {
            let shared: BTreeSet<Slot> = introduced(a, r2).into_iter().filter(|s| mine.contains(s)).collect();
            if !shared.is_empty() {
                let who = if r.owner() == r2.owner() {
                    format!("{} introduces {} twice", r.owner(), fmt_slots(&shared))
                } else {
                    let (x, y) = (r.owner().min(r2.owner()), r.owner().max(r2.owner()));
                    format!("{} introduced by both {x} and {y}", fmt_slots(&shared))
                };
                fail(CheckId::C1, vec![r, r2], who);
            }
        }
    }

    // C2
    let mut received: BTreeMap<(&str, Slot), Vec<&Relation>> = BTreeMap::new();
    for r in rels {
        if let Relation::Receive { receiver, payload, .. } = r {
            let slots: BTreeSet<Slot> = payload.iter().flat_map(|v| a.slots_of(v)).collect();
            for s in slots {
                received.entry((receiver.as_str(), s)).or_default().push(r);
            }
        }
    }
    let mut reported: BTreeSet<(&str, String)> = BTreeSet::new();
    for ((receiver, slot), rs) in &received {
        if rs.len() > 1 && reported.insert((receiver, slot.var.clone())) {
            fail(CheckId::C2, rs.clone(), format!("{receiver} receives {} from more than one source", slot.var));
        }
        for r in rels.iter().filter(|r| r.owner() == *receiver) {
            if introduced(a, r).contains(slot) && reported.insert((receiver, format!("own:{}", slot.var))) {
                let mut v = rs.clone();
                v.push(r);
                fail(CheckId::C2, v, format!("{receiver} receives {} which it introduces itself", slot.var));
            }
        }
    }

    // C3
    let mut obtain: BTreeMap<&str, BTreeSet<Slot>> = BTreeMap::new();
    for c in &a.components {
        obtain.insert(c, obtainable(a, c));
    }
    let empty = BTreeSet::new();
    for r in rels {
        let needed = match r {
            Relation::Compute { eq, .. } => {
                let mut refs = Vec::new();
                eq.rhs.var_refs(&mut refs);
                refs.iter().flat_map(|v| a.slots_of(v)).collect()
            }
            Relation::Check { eqs, .. } => eq_slots(a, eqs),
            _ => continue,
        };
        let got = obtain.get(r.owner()).unwrap_or(&empty);
        let missing: BTreeSet<Slot> = needed.difference(got).cloned().collect();
        if !missing.is_empty() {
            fail(CheckId::C3, vec![r], format!("{} cannot obtain {}", r.owner(), fmt_slots(&missing)));
        }
    }

    // C4
    for r in rels {
        let stmt = match r {
            Relation::VerifyProof { proof, .. } => Statement::Proof(proof.clone()),
            Relation::VerifyAttest { attest, .. } => Statement::Attest(attest.clone()),
            _ => continue,
        };
        let ok = rels.iter().any(|r2| {
            matches!(r2, Relation::Receive { receiver, statements, .. }
                if receiver == r.owner() && statements.contains(&stmt))
        });
        if !ok {
            fail(CheckId::C4, vec![r], format!("{} verifies a statement it never receives", r.owner()));
        }
    }

    // C5
    for r in rels {
        let Relation::Spotcheck { checker, source, array, eqs, .. } = r else { continue };
        let sources: BTreeSet<&str> =
            rels.iter().filter(|r2| introduced(a, r2).iter().any(|s| &s.var == array)).map(|r2| r2.owner()).collect();
        if sources.len() != 1 || !sources.contains(source.as_str()) {
            fail(CheckId::C5, vec![r], format!("{source} is not the source of {array}"));
        }
        let got = obtain.get(checker.as_str()).unwrap_or(&empty);
        let missing: BTreeSet<Slot> =
            eq_slots(a, eqs).into_iter().filter(|s| &s.var != array && !got.contains(s)).collect();
        if !missing.is_empty() {
            fail(CheckId::C5, vec![r], format!("{checker} cannot obtain {}", fmt_slots(&missing)));
        }
        if got.iter().any(|s| &s.var == array) || a.deps_of(checker).any(|d| &d.target.name == array) {
            fail(CheckId::C5, vec![r], format!("{checker} spot-checks {array} but can obtain it otherwise"));
        }
    }
    let mut spot: BTreeMap<(&str, &str, &str), Vec<&Relation>> = BTreeMap::new();
    for r in rels {
        if let Relation::Spotcheck { checker, source, array, .. } = r {
            spot.entry((checker, source, array)).or_default().push(r);
        }
    }
    for ((checker, source, array), rs) in spot {
        if rs.len() > 1 {
            fail(CheckId::C5, rs, format!("several spotchecks of {array} by {checker} on {source}"));
        }
    }

    // C6
    for r in rels {
        if let Relation::Trust { truster, trustee } = r {
            if truster == trustee {
                fail(CheckId::C6, vec![r], format!("{truster} trusts itself"));
            }
            if !a.has_component(truster) || !a.has_component(trustee) {
                fail(CheckId::C6, vec![r], "trust between undeclared components".into());
            }
        }
    }

    fails.sort();
    fails.dedup();
    let mut entries = Vec::new();
    for id in CheckId::ALL {
        let mine: Vec<CheckEntry> = fails.iter().filter(|e| e.check == id).cloned().collect();
        if mine.is_empty() {
            entries.push(CheckEntry { check: id, status: Status::Pass, relations: Vec::new(), message: String::new() });
        } else {
            entries.extend(mine);
        }
    }
    ConsistencyReport { entries }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::{parse_bundle, SMART_METERING};

    fn smart() -> Architecture {
        parse_bundle(SMART_METERING).unwrap().architecture
    }

    fn with(extra: &str) -> Architecture {
        let src = SMART_METERING.replacen("trust P M;", &format!("trust P M; {extra}"), 1);
        parse_bundle(&src).unwrap().architecture
    }

    #[test]
    fn smart_metering_is_consistent() {
        let r = check_architecture(&smart());
        assert!(r.is_pass(), "{r}");
        assert_eq!(r.entries.len(), 6);
    }

    #[test]
    fn second_fee_computation_fails_c1() {
        let r = check_architecture(&with("compute P (Fee = iter(+, y));"));
        assert!(r.failed(CheckId::C1));
        let e = r.failures().find(|e| e.check == CheckId::C1).unwrap();
        assert_eq!(e.relations.len(), 2);
        assert!(e.message.contains("Fee"));
    }

    #[test]
    fn provider_check_without_inputs_fails_c3() {
        let r = check_architecture(&with("check P { y[t] = F(x[t]); }"));
        assert!(r.failed(CheckId::C3));
        assert!(!r.failed(CheckId::C1));
        let e = r.failures().next().unwrap();
        assert!(e.message.contains("x[0]") && e.message.contains("y[0]"), "{}", e.message);
    }

    #[test]
    fn receive_from_two_senders_fails_c2() {
        let src = "architecture a { component A B C; var v; has A (v);
            receive C from A { } vars { v }; receive C from B { } vars { v }; }";
        let a = parse_bundle(src).unwrap().architecture;
        assert!(check_architecture(&a).failed(CheckId::C2));
    }

    #[test]
    fn verifying_unreceived_statement_fails_c4() {
        let r = check_architecture(&with("verify_attest P (attest M { Fee = 3; });"));
        assert!(r.failed(CheckId::C4));
    }

    #[test]
    fn spotcheck_conditions() {
        let ok = "architecture a { component M P; array Cons[2]; array x[2]; fun S/1;
            has M (Cons); compute M (x[t] = S(Cons[t]));
            receive P from M { } vars { x };
            spotcheck P from M (Cons[k], { x[k] = S(Cons[k]) }); }";
        assert!(check_architecture(&parse_bundle(ok).unwrap().architecture).is_pass());
        let wrong_source = ok.replace("spotcheck P from M", "spotcheck P from P");
        assert!(check_architecture(&parse_bundle(&wrong_source).unwrap().architecture).failed(CheckId::C5));
        let leaks = ok.replace("}); }", "}); dep P: Cons[t] <- { x[t] }; }");
        assert!(check_architecture(&parse_bundle(&leaks).unwrap().architecture).failed(CheckId::C5));
    }

    #[test]
    fn self_trust_fails_c6() {
        let r = check_architecture(&with("trust M M;"));
        assert!(r.failed(CheckId::C6));
    }

    #[test]
    fn cyclic_computation_fails_c3() {
        let src = "architecture a { component A; var u, v; fun f/1;
            compute A (u = f(v)); compute A (v = f(u)); }";
        let r = check_architecture(&parse_bundle(src).unwrap().architecture);
        assert_eq!(r.failures().filter(|e| e.check == CheckId::C3).count(), 2);
    }

    #[test]
    fn order_insensitive() {
        let mut a = with("compute P (Fee = iter(+, y)); check P { y[t] = F(x[t]); }");
        let r1 = check_architecture(&a);
        a.relations.reverse();
        assert_eq!(r1, check_architecture(&a));
        assert!(r1.failures().all(|e| !e.relations.is_empty()));
    }

    #[test]
    fn json_shape() {
        let r = check_architecture(&with("trust M M;"));
        let v = serde_json::to_value(&r.entries).unwrap();
        let f = v.as_array().unwrap().iter().find(|e| e["status"] == "fail").unwrap();
        assert_eq!(f["check"], "C6");
        assert!(f["relations"].is_array());
        assert!(f["message"].is_string());
    }
}
