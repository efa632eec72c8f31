//! Breadth-first enumeration of reachable configurations.

use std::collections::{BTreeSet, HashMap, VecDeque};

use crate::model::*;
use crate::semantics::{step, ComponentState, Configuration, Event, EventSpace, GlobalState, SentStatement, Trace};

type LocalView<'a> =
    (Option<&'a ComponentState>, Option<&'a BTreeSet<SentStatement>>, Vec<&'a (String, String, String)>);

/// What a component can observe of a configuration: its own state, the statements it has
/// received and the spotchecks it has performed.
fn local_view<'a>(cfg: &'a Configuration, c: &str) -> LocalView<'a> {
    (cfg.state.get(c), cfg.inbox.get(c), cfg.spotchecks.iter().filter(|s| s.0 == c).collect())
}

/// The reachable part of the configuration graph.
#[derive(Clone, Debug)]
pub struct Exploration {
    pub components: Vec<ComponentId>,
    pub configs: Vec<Configuration>,
    /// Predecessor on a shortest trace, with the event taken.
    pub parent: Vec<Option<(usize, Event)>>,
    pub succ: Vec<Vec<u32>>,
    /// `complete[id][i]`: no enabled event of component `i` changes what `i` observes.
    pub complete: Vec<Vec<bool>>,
    /// Exploration stopped early (state or trace-length bound).
    pub truncated: bool,
    /// The derive cap prevented an enabled derive somewhere.
    pub capped: bool,
}

impl Exploration {
    pub fn exhaustive(&self) -> bool {
        !self.truncated && !self.capped
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn trace_to(&self, mut id: usize) -> Trace {
        let mut t = Vec::new();
        while let Some((p, e)) = &self.parent[id] {
            t.push(e.clone());
            id = *p;
        }
        t.reverse();
        t
    }

    /// Distinct global states (history forgotten).
    pub fn states(&self) -> BTreeSet<&GlobalState> {
        self.configs.iter().map(|c| &c.state).collect()
    }

    pub fn predecessors(&self) -> Vec<Vec<u32>> {
        let mut pred = vec![Vec::new(); self.configs.len()];
        for (i, s) in self.succ.iter().enumerate() {
            for &j in s {
                pred[j as usize].push(i as u32);
            }
        }
        pred
    }

    /// Configurations from which some configuration in `target` is reachable.
    pub fn can_reach(&self, pred: &[Vec<u32>], target: &[bool]) -> Vec<bool> {
        let mut seen = target.to_vec();
        let mut queue: VecDeque<usize> = (0..target.len()).filter(|i| target[*i]).collect();
        while let Some(i) = queue.pop_front() {
            for &p in &pred[i] {
                if !seen[p as usize] {
                    seen[p as usize] = true;
                    queue.push_back(p as usize);
                }
            }
        }
        seen
    }
}

pub fn explore(a: &Architecture, model: &Model) -> Exploration {
    let interp = &model.interp;
    let bounds = &model.bounds;
    let space = EventSpace::new(a, interp, bounds);
    let init = Configuration::initial(a);
    let mut ids: HashMap<Configuration, usize> = HashMap::new();
    ids.insert(init.clone(), 0);
    let mut ex = Exploration {
        components: a.components.clone(),
        configs: vec![init],
        parent: vec![None],
        succ: vec![Vec::new()],
        complete: Vec::new(),
        truncated: bounds.value_cap.is_some_and(|c| c.max(1) < interp.domain_size()),
        capped: false,
    };
    let mut depth = vec![0usize];
    let mut next = 0;
    while next < ex.configs.len() {
        let id = next;
        next += 1;
        let cfg = ex.configs[id].clone();
        let mut complete = vec![true; a.components.len()];
        if space.derive_capped(&cfg) {
            ex.capped = true;
        }
        let events = space.enabled(&cfg, interp);
        if depth[id] >= bounds.max_trace_len && !events.is_empty() {
            ex.truncated = true;
            ex.complete.push(vec![false; a.components.len()]);
            continue;
        }
        let mut succ = BTreeSet::new();
        for e in events {
            let Ok(n) = step(&e, &cfg, a, interp) else { continue };
            let owner = e.owner();
            if let Some(ci) = a.component_index(owner) {
                if local_view(&n, owner) != local_view(&cfg, owner) {
                    complete[ci] = false;
                }
            }
            if n == cfg {
                continue;
            }
            let nid = match ids.get(&n) {
                Some(&nid) => nid,
                None => {
                    if ex.configs.len() >= bounds.max_states {
                        ex.truncated = true;
                        continue;
                    }
                    let nid = ex.configs.len();
                    ids.insert(n.clone(), nid);
                    ex.configs.push(n);
                    ex.parent.push(Some((id, e)));
                    ex.succ.push(Vec::new());
                    depth.push(depth[id] + 1);
                    nid
                }
            };
            succ.insert(nid as u32);
        }
        ex.succ[id] = succ.into_iter().collect();
        ex.complete.push(complete);
    }
    ex
}
