use std::fmt;

use serde::{Deserialize, Serialize};

use crate::model::*;

/// A statement as delivered: proofs carry the sender's values of the variables they mention.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SentStatement {
    pub statement: Statement,
    /// Sorted by slot.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshot: Vec<(Slot, i64)>,
}

/// Values for the slots of a ground variable reference, in slot order.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment {
    pub var: VarRef,
    pub values: Vec<i64>,
}

/// A ground event. Index variables are instantiated except inside statements and the
/// equations of a spotcheck, which stay in their quantified form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "snake_case")]
pub enum Event {
    Has {
        owner: ComponentId,
        assignment: Assignment,
    },
    Receive {
        receiver: ComponentId,
        sender: ComponentId,
        statements: Vec<SentStatement>,
        payload: Vec<Assignment>,
    },
    Compute {
        owner: ComponentId,
        eq: Equation,
    },
    /// A computation outside the architecture, licensed by a Dep entry of the owner.
    Derive {
        owner: ComponentId,
        sources: Vec<VarRef>,
        assignment: Assignment,
    },
    Check {
        owner: ComponentId,
        eqs: Vec<Equation>,
    },
    VerifyProof {
        owner: ComponentId,
        proof: ProofStatement,
    },
    VerifyAttest {
        owner: ComponentId,
        attest: Attestation,
    },
    Spotcheck {
        checker: ComponentId,
        source: ComponentId,
        array: String,
        index: usize,
        value: i64,
        eqs: Vec<Equation>,
    },
}

impl Event {
    /// The component whose state the event changes.
    pub fn owner(&self) -> &str {
        match self {
            Event::Has { owner, .. }
            | Event::Compute { owner, .. }
            | Event::Derive { owner, .. }
            | Event::Check { owner, .. }
            | Event::VerifyProof { owner, .. }
            | Event::VerifyAttest { owner, .. } => owner,
            Event::Receive { receiver, .. } => receiver,
            Event::Spotcheck { checker, .. } => checker,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Event::Has { .. } => "has",
            Event::Receive { .. } => "receive",
            Event::Compute { .. } => "compute",
            Event::Derive { .. } => "derive",
            Event::Check { .. } => "check",
            Event::VerifyProof { .. } => "verify_proof",
            Event::VerifyAttest { .. } => "verify_attest",
            Event::Spotcheck { .. } => "spotcheck",
        }
    }
}

fn assignment(a: &Assignment) -> String {
    match a.values.as_slice() {
        [v] => format!("{}:{v}", a.var),
        vs => format!("{}:{vs:?}", a.var),
    }
}

impl fmt::Display for Event {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Event::Has { owner, assignment: a } => write!(f, "Has_{owner}({})", assignment(a)),
            Event::Receive { receiver, sender, statements, payload } => {
                let p: Vec<String> = payload.iter().map(assignment).collect();
                write!(f, "Receive_{{{receiver},{sender}}}({} statements, {{{}}})", statements.len(), p.join(", "))
            }
            Event::Compute { owner, eq } => write!(f, "Compute_{owner}({eq})"),
            Event::Derive { owner, sources, assignment: a } => {
                let s: Vec<String> = sources.iter().map(|v| v.to_string()).collect();
                write!(f, "Derive_{owner}({} from {{{}}})", assignment(a), s.join(", "))
            }
            Event::Check { owner, eqs } => write!(f, "Check_{owner}({{{}}})", display_conj(eqs)),
            Event::VerifyProof { owner, proof } => write!(f, "VerifProof_{owner}(Proof_{})", proof.author),
            Event::VerifyAttest { owner, attest } => {
                write!(f, "VerifAttest_{owner}(Attest_{}({{{}}}))", attest.author, display_conj(&attest.equations))
            }
            Event::Spotcheck { checker, source, array, index, value, .. } => {
                write!(f, "Spotcheck_{{{checker},{source}}}({array}[{index}]:{value})")
            }
        }
    }
}

pub type Trace = Vec<Event>;

#[derive(Debug, thiserror::Error)]
#[error("line {line}: {source}")]
pub struct TraceParseError {
    pub line: usize,
    #[source]
    pub source: serde_json::Error,
}

/// One JSON object per line.
pub fn trace_to_jsonl(t: &[Event]) -> String {
    let mut out = String::new();
    for e in t {
        out.push_str(&serde_json::to_string(e).expect("events serialize"));
        out.push('\n');
    }
    out
}

pub fn trace_from_jsonl(s: &str) -> Result<Trace, TraceParseError> {
    s.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|source| TraceParseError { line: i + 1, source }))
        .collect()
}
