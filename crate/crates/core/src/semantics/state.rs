use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::event::SentStatement;
use crate::model::*;

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LiveState {
    /// Defined slots; absent slots are undefined.
    pub vars: BTreeMap<Slot, i64>,
    /// Components this one trusts (the trust facts of its known properties).
    pub trusts: BTreeSet<ComponentId>,
    /// Known ground equations.
    pub pk: BTreeSet<Equation>,
    /// Believed ground equations.
    pub pb: BTreeSet<Equation>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum ComponentState {
    Error,
    Live(LiveState),
}

impl ComponentState {
    pub fn live(&self) -> Option<&LiveState> {
        match self {
            ComponentState::Live(l) => Some(l),
            ComponentState::Error => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, ComponentState::Error)
    }

    pub fn value(&self, s: &Slot) -> Option<i64> {
        self.live().and_then(|l| l.vars.get(s).copied())
    }
}

/// One state per component, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GlobalState {
    pub components: Vec<(ComponentId, ComponentState)>,
}

impl GlobalState {
    pub fn get(&self, c: &str) -> Option<&ComponentState> {
        self.components.iter().find(|(n, _)| n == c).map(|(_, s)| s)
    }

    pub fn get_mut(&mut self, c: &str) -> Option<&mut ComponentState> {
        self.components.iter_mut().find(|(n, _)| n == c).map(|(_, s)| s)
    }
}

pub fn initial_state(a: &Architecture) -> GlobalState {
    let components = a
        .components
        .iter()
        .map(|c| {
            let trusts = a
                .relations
                .iter()
                .filter_map(|r| match r {
                    Relation::Trust { truster, trustee } if truster == c => Some(trustee.clone()),
                    _ => None,
                })
                .collect();
            (c.clone(), ComponentState::Live(LiveState { trusts, ..Default::default() }))
        })
        .collect();
    GlobalState { components }
}

/// Identifies a ground receive so that it happens at most once per trace.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ReceiveKey {
    pub receiver: ComponentId,
    pub sender: ComponentId,
    pub statements: Vec<Statement>,
    pub payload: Vec<VarRef>,
}

/// A global state together with the trace history that constrains what may happen next.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Configuration {
    pub state: GlobalState,
    /// Statements each component has received.
    pub inbox: BTreeMap<ComponentId, BTreeSet<SentStatement>>,
    pub receives: BTreeSet<ReceiveKey>,
    /// (checker, source, array) triples already spot-checked.
    pub spotchecks: BTreeSet<(ComponentId, ComponentId, String)>,
    /// Number of derive events so far.
    pub derives: usize,
}

impl Configuration {
    pub fn initial(a: &Architecture) -> Self {
        Configuration {
            state: initial_state(a),
            inbox: BTreeMap::new(),
            receives: BTreeSet::new(),
            spotchecks: BTreeSet::new(),
            derives: 0,
        }
    }
}
