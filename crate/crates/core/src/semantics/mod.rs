//! Trace semantics: ground events, component states and the event state machine.

mod compat;
mod enabled;
mod event;
mod simulate;
mod state;
mod step;
mod trace;

pub use compat::{
    compatible_event, derive_licensed, ground_deps, matches_template, own_slots, templates, templates_of, Template,
};
pub use enabled::EventSpace;
pub use event::{trace_from_jsonl, trace_to_jsonl, Assignment, Event, SentStatement, Trace, TraceParseError};
pub use simulate::random_trace;
pub use state::{initial_state, ComponentState, Configuration, GlobalState, LiveState, ReceiveKey};
pub use step::{snapshot_for, spot_index_var, step, StepError};
pub use trace::{check_trace, run_trace, run_trace_config, TraceError, Violation, ViolationKind};

#[cfg(test)]
mod tests;
