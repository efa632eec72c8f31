use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::enabled::EventSpace;
use super::event::Trace;
use super::state::Configuration;
use super::step::step;
use crate::model::*;

/// A random compatible trace: each step picks uniformly among the enabled events. The same
/// seed always yields the same trace.
pub fn random_trace(a: &Architecture, model: &Model, seed: u64, max_len: usize) -> (Trace, Configuration) {
    let space = EventSpace::new(a, &model.interp, &model.bounds);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cfg = Configuration::initial(a);
    let mut trace = Vec::new();
    while trace.len() < max_len {
        let mut enabled = space.enabled(&cfg, &model.interp);
        enabled.retain(|e| step(e, &cfg, a, &model.interp).is_ok_and(|n| n != cfg));
        let Some(e) = enabled.choose(&mut rng).cloned() else { break };
        cfg = step(&e, &cfg, a, &model.interp).expect("enabled events step");
        trace.push(e);
    }
    (trace, cfg)
}
