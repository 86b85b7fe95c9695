use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::Terminal;
use crate::automata::StateId;

/// One product step: the state before the action, and the reward it earned.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub t: usize,
    pub env_time: usize,
    pub state: Value,
    /// Propositions of the last consumed assignment.
    pub sigma: Vec<String>,
    pub q: Option<StateId>,
    pub accepting: bool,
    pub action: Value,
    pub epsilon: bool,
    pub reward: i8,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceOutcome {
    pub terminal: Terminal,
    pub env_steps: usize,
    pub accepting_visits: usize,
    pub avoid_violations: usize,
    /// Environment time at which acceptance became guaranteed.
    pub guaranteed_at: Option<usize>,
    pub final_state: Option<StateId>,
    pub final_accepting: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trace {
    pub records: Vec<TraceRecord>,
    pub outcome: TraceOutcome,
}

impl Trace {
    /// Acceptance of `q_0 … q_T`, the final state included.
    pub fn accepting_flags(&self) -> Vec<bool> {
        self.records
            .iter()
            .map(|r| r.accepting)
            .chain(std::iter::once(self.outcome.final_accepting))
            .collect()
    }

    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("trace serializes")
    }

    /// One line per record followed by the outcome line.
    pub fn to_ndjson(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("record serializes"));
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.outcome).expect("outcome serializes"));
        out.push('\n');
        out
    }
}
