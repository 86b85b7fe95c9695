use serde::{Deserialize, Serialize};

use super::Trace;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Horizon {
    Finite,
    Infinite,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRecord {
    pub success: bool,
    /// Environment steps until acceptance became guaranteed.
    pub steps: Option<usize>,
    pub accepting_visits: usize,
}

/// Finite horizon: success iff acceptance became guaranteed, measured at the
/// step the automaton entered that region. Infinite horizon: only the visit
/// count is meaningful; success means at least one accepting visit.
pub fn classify_outcome(trace: &Trace, horizon: Horizon) -> OutcomeRecord {
    let o = &trace.outcome;
    match horizon {
        Horizon::Finite => OutcomeRecord {
            success: o.guaranteed_at.is_some(),
            steps: o.guaranteed_at,
            accepting_visits: o.accepting_visits,
        },
        Horizon::Infinite => OutcomeRecord {
            success: o.accepting_visits > 0,
            steps: None,
            accepting_visits: o.accepting_visits,
        },
    }
}

/// `Σ_t γ^t 1[q_t ∈ F]` over every state of the trace.
pub fn discounted_accepting_return(trace: &Trace, gamma: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&gamma) {
        return Err(Error::InvalidArgument(format!(
            "discount {gamma} outside [0, 1)"
        )));
    }
    Ok(discounted(&trace.accepting_flags(), gamma))
}

pub(crate) fn discounted(flags: &[bool], gamma: f64) -> f64 {
    let mut total = 0.0;
    let mut w = 1.0;
    for &f in flags {
        if f {
            total += w;
        }
        w *= gamma;
    }
    total
}
