//! Possession judgments: saturation of Has^all, Has^one and Has^none.

use std::collections::{BTreeMap, BTreeSet};

use super::Derivation;
use crate::model::*;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Why {
    Rel(usize),
    Dep(DepEntry),
}

#[derive(Clone, Debug, Default)]
struct ComponentHas {
    /// Slots in ALL, with the saturation round that added them.
    all: BTreeMap<Slot, (usize, Why)>,
    /// Slots the component might come to hold by any means, spotchecks included.
    reach: BTreeSet<Slot>,
    spotchecked: BTreeMap<String, usize>,
}

/// Per-component ALL / ONE / NONE sets over variables and array elements.
#[derive(Clone, Debug)]
pub struct HasStatus {
    arch: Architecture,
    comps: BTreeMap<String, ComponentHas>,
}

fn rule_of(r: &Relation) -> &'static str {
    match r {
        Relation::Has { .. } => "H1",
        Relation::Receive { .. } => "H2",
        _ => "H3",
    }
}

fn provided(r: &Relation) -> Vec<VarRef> {
    match r {
        Relation::Has { var, .. } => vec![var.clone()],
        Relation::Receive { payload, .. } => payload.clone(),
        Relation::Compute { .. } => r.compute_target().cloned().into_iter().collect(),
        _ => Vec::new(),
    }
}

fn ground_entries(a: &Architecture, d: &DepEntry) -> Vec<DepEntry> {
    match d.index_var() {
        None => vec![d.clone()],
        Some(k) => {
            let range = std::iter::once(&d.target)
                .chain(&d.sources)
                .filter(|v| v.index_var() == Some(k))
                .filter_map(|v| a.range_of(&v.name))
                .min()
                .unwrap_or(0);
            (0..range).map(|c| d.instantiate(k, c)).collect()
        }
    }
}

pub fn saturate_has(a: &Architecture) -> HasStatus {
    let mut comps = BTreeMap::new();
    for c in &a.components {
        let mut ch = ComponentHas::default();
        for (ri, r) in a.relations.iter().enumerate().filter(|(_, r)| r.owner() == c) {
            for v in provided(r) {
                for s in a.slots_of(&v) {
                    ch.all.entry(s).or_insert((0, Why::Rel(ri)));
                }
            }
            if let Relation::Spotcheck { array, .. } = r {
                ch.spotchecked.entry(array.clone()).or_insert(ri);
            }
        }
        let ground: Vec<(DepEntry, Vec<Slot>, Vec<Slot>)> = a
            .deps_of(c)
            .flat_map(|d| ground_entries(a, d))
            .map(|g| {
                let t = a.slots_of(&g.target);
                let s = g.sources.iter().flat_map(|v| a.slots_of(v)).collect();
                (g, t, s)
            })
            .collect();
        for round in 1.. {
            let mut added = Vec::new();
            for (g, targets, sources) in &ground {
                if sources.iter().all(|s| ch.all.contains_key(s)) {
                    for t in targets.iter().filter(|t| !ch.all.contains_key(*t)) {
                        added.push((t.clone(), Why::Dep(g.clone())));
                    }
                }
            }
            if added.is_empty() {
                break;
            }
            for (t, why) in added {
                ch.all.entry(t).or_insert((round, why));
            }
        }
        ch.reach = ch.all.keys().cloned().collect();
        for arr in ch.spotchecked.keys() {
            ch.reach.extend(a.slots_of(&VarRef::whole(arr.clone())));
        }
        loop {
            let before = ch.reach.len();
            for (_, targets, sources) in &ground {
                if sources.iter().all(|s| ch.reach.contains(s)) {
                    ch.reach.extend(targets.iter().cloned());
                }
            }
            if ch.reach.len() == before {
                break;
            }
        }
        comps.insert(c.clone(), ch);
    }
    HasStatus { arch: a.clone(), comps }
}

fn concl(kind: &str, c: &str, v: &VarRef) -> String {
    format!("Has^{kind}_{c}({v})")
}

impl HasStatus {
    fn comp(&self, c: &str) -> Option<&ComponentHas> {
        self.comps.get(c)
    }

    fn is_element(&self, v: &VarRef) -> bool {
        matches!(v.index, Some(Index::Lit(_))) || !self.arch.is_array(&v.name)
    }

    /// Whether `s` is in ALL for `c`.
    pub fn in_all(&self, c: &str, s: &Slot) -> bool {
        self.comp(c).is_some_and(|ch| ch.all.contains_key(s))
    }

    /// Whether `c` might come to hold `s` by any means, samples included.
    pub fn may_obtain(&self, c: &str, s: &Slot) -> bool {
        self.comp(c).is_some_and(|ch| ch.reach.contains(s) || ch.spotchecked.contains_key(&s.var))
    }

    pub fn has_all(&self, c: &str, v: &VarRef) -> bool {
        self.comp(c).is_some_and(|ch| self.arch.slots_of(v).iter().all(|s| ch.all.contains_key(s)))
    }

    pub fn has_none(&self, c: &str, v: &VarRef) -> bool {
        self.comp(c).is_some_and(|ch| {
            !ch.spotchecked.contains_key(&v.name) && self.arch.slots_of(v).iter().all(|s| !ch.reach.contains(s))
        })
    }

    pub fn has_one(&self, c: &str, v: &VarRef) -> bool {
        self.has_none(c, v) || self.spotcheck_of(c, v).is_some()
    }

    fn spotcheck_of(&self, c: &str, v: &VarRef) -> Option<usize> {
        if self.is_element(v) {
            return None;
        }
        self.comp(c)?.spotchecked.get(&v.name).copied()
    }

    fn items(&self, pred: impl Fn(&VarRef) -> bool) -> BTreeSet<VarRef> {
        let mut out = BTreeSet::new();
        for name in self.arch.variables() {
            let whole = VarRef::whole(name.clone());
            if pred(&whole) {
                out.insert(whole);
            }
            for k in 0..self.arch.range_of(&name).unwrap_or(0) {
                let e = VarRef::at(name.clone(), k);
                if pred(&e) {
                    out.insert(e);
                }
            }
        }
        out
    }

    pub fn all_set(&self, c: &str) -> BTreeSet<VarRef> {
        self.items(|v| self.has_all(c, v))
    }

    pub fn none_set(&self, c: &str) -> BTreeSet<VarRef> {
        self.items(|v| self.has_none(c, v))
    }

    pub fn one_set(&self, c: &str) -> BTreeSet<VarRef> {
        self.items(|v| self.has_one(c, v))
    }

    pub fn derive_all(&self, c: &str, v: &VarRef) -> Option<Derivation> {
        if !self.has_all(c, v) {
            return None;
        }
        let ch = self.comp(c)?;
        let a = &self.arch;
        let slots = a.slots_of(v);
        let rank = |s: &Slot| ch.all[s].0;
        let goal = concl("all", c, v);

        if let [s] = slots.as_slice() {
            if self.is_element(v) {
                return Some(match &ch.all[s].1 {
                    Why::Rel(ri) => {
                        let r = &a.relations[*ri];
                        let covering = provided(r).into_iter().find(|p| a.slots_of(p).contains(s))?;
                        let base = Derivation::node(
                            rule_of(r),
                            concl("all", c, &covering),
                            vec![Derivation::leaf("relation", r.to_string())],
                        );
                        if a.slots_of(&covering).len() > 1 {
                            Derivation::node("H7", goal, vec![base])
                        } else {
                            base
                        }
                    }
                    Why::Dep(entry) => {
                        let mut prem = vec![Derivation::leaf("dep", entry.to_string())];
                        for src in dedup_refs(a, &entry.sources) {
                            prem.push(self.derive_all(c, &src)?);
                        }
                        Derivation::node("H5", goal, prem)
                    }
                });
            }
        }

        for r in a.relations.iter().filter(|r| r.owner() == c) {
            if provided(r).iter().any(|p| slots.iter().all(|s| a.slots_of(p).contains(s))) {
                return Some(Derivation::node(rule_of(r), goal, vec![Derivation::leaf("relation", r.to_string())]));
            }
        }

        let lo = slots.iter().map(rank).min().unwrap_or(0);
        for d in a
            .deps_of(c)
            .filter(|d| d.target.name == v.name && d.target.index.as_ref().is_none_or(|i| matches!(i, Index::Var(_))))
        {
            let ground = ground_entries(a, d);
            let src_slots: Vec<Slot> =
                ground.iter().flat_map(|g| g.sources.iter().flat_map(|s| a.slots_of(s))).collect();
            if src_slots.iter().all(|s| ch.all.get(s).is_some_and(|(r, _)| *r < lo)) {
                let mut prem = vec![Derivation::leaf("dep", d.to_string())];
                let mut seen = BTreeSet::new();
                for s in &d.sources {
                    let whole = if s.index_var().is_some() { VarRef::whole(s.name.clone()) } else { s.clone() };
                    if seen.insert(whole.clone()) {
                        prem.push(self.derive_all(c, &whole)?);
                    }
                }
                return Some(Derivation::node("H5", goal, prem));
            }
        }

        let mut prem = Vec::new();
        for s in &slots {
            prem.push(self.derive_all(c, &s.to_var_ref())?);
        }
        Some(Derivation::node("Elements", goal, prem))
    }

    pub fn derive_none(&self, c: &str, v: &VarRef) -> Option<Derivation> {
        if !self.has_none(c, v) {
            return None;
        }
        if self.is_element(v) && self.arch.is_array(&v.name) {
            let whole = VarRef::whole(v.name.clone());
            if self.has_none(c, &whole) {
                return Some(Derivation::node(
                    "H8",
                    concl("none", c, v),
                    vec![Derivation::leaf("H6", concl("none", c, &whole))],
                ));
            }
        }
        Some(Derivation::leaf("H6", concl("none", c, v)))
    }

    pub fn derive_one(&self, c: &str, v: &VarRef) -> Option<Derivation> {
        if let Some(n) = self.derive_none(c, v) {
            return Some(Derivation::node("HNO", concl("one", c, v), vec![n]));
        }
        let ri = self.spotcheck_of(c, v)?;
        Some(Derivation::node(
            "H4",
            concl("one", c, v),
            vec![Derivation::leaf("relation", self.arch.relations[ri].to_string())],
        ))
    }
}

/// Source references of a ground Dep entry, one per distinct variable or element.
fn dedup_refs(a: &Architecture, refs: &[VarRef]) -> Vec<VarRef> {
    let mut seen = BTreeSet::new();
    refs.iter().filter(|r| seen.insert(a.slots_of(r))).cloned().collect()
}
