//! Reach-avoid sequences extracted from LDBA states.
//!
//! From a query state, [`accepting_paths`] enumerates the runs that end in an
//! accepting cycle, [`mark_avoid`] decides which states each step must steer
//! clear of, and [`build_sequence`] turns a path into per-step `(β⁺, β⁻)`
//! Boolean formulae.

pub mod avoid;
pub mod paths;
pub mod sequence;
pub mod template;

use std::fmt;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::automata::StateId;
use crate::error::{Error, Result};
use crate::ltl::{BooleanFormula, PredicateInstance, Signature};

pub use avoid::mark_avoid;
pub use paths::accepting_paths;
pub use sequence::{build_sequence, sequences_from, DEFAULT_K};
pub use template::{formula_template, template_for_letters};

/// How one state of a path is left for the next.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Edge {
    Letter,
    /// ε edge by id.
    Epsilon(usize),
}

/// A run from the query state into an accepting cycle.
///
/// `edges[i]` leaves `states[i]`; the last edge closes the cycle from the last
/// state back to `states[loopback]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AcceptingPath {
    pub states: Vec<StateId>,
    pub edges: Vec<Edge>,
    pub loopback: usize,
    pub last_accepting: Option<usize>,
}

impl AcceptingPath {
    /// Target of the edge leaving position `i`.
    pub fn next_index(&self, i: usize) -> usize {
        if i + 1 < self.states.len() {
            i + 1
        } else {
            self.loopback
        }
    }
}

/// What a step asks for.
#[derive(Clone, Debug, PartialEq)]
pub enum Reach {
    Formula(BooleanFormula),
    /// Take the ε edge with this id.
    Epsilon(usize),
}

impl fmt::Display for Reach {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reach::Formula(b) => write!(f, "{b}"),
            Reach::Epsilon(id) => write!(f, "eps{id}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SeqStep {
    pub reach: Reach,
    pub avoid: BooleanFormula,
    /// `(q_i, q_{i+1})` when the step comes from an automaton path.
    pub states: Option<(StateId, StateId)>,
}

impl SeqStep {
    pub fn formula(reach: BooleanFormula, avoid: BooleanFormula) -> Self {
        Self {
            reach: Reach::Formula(reach),
            avoid,
            states: None,
        }
    }

    pub fn via_epsilon(&self) -> bool {
        matches!(self.reach, Reach::Epsilon(_))
    }
}

#[derive(Clone, Debug, PartialEq, Default)]
pub struct ReachAvoidSequence {
    pub steps: Vec<SeqStep>,
    /// Query state the sequence was extracted from.
    pub origin: Option<StateId>,
}

impl ReachAvoidSequence {
    pub fn new(steps: Vec<SeqStep>) -> Self {
        Self {
            steps,
            origin: None,
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Number of steps that consume an assignment.
    pub fn letter_steps(&self) -> usize {
        self.steps.iter().filter(|s| !s.via_epsilon()).count()
    }

    /// States visited, `q_0` first; empty for sequences not tied to an automaton.
    pub fn state_path(&self) -> Vec<StateId> {
        let mut out = Vec::new();
        for s in &self.steps {
            if let Some((a, b)) = s.states {
                if out.is_empty() {
                    out.push(a);
                }
                out.push(b);
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "origin": self.origin,
            "steps": self.steps.iter().map(|s| json!({
                "reach": s.reach.to_string(),
                "avoid": s.avoid.to_string(),
                "epsilon": s.via_epsilon(),
                "from": s.states.map(|p| p.0),
                "to": s.states.map(|p| p.1),
            })).collect::<Vec<_>>(),
        })
    }

    /// One `reach … avoid …` line per step.
    pub fn render(&self) -> String {
        self.steps
            .iter()
            .map(|s| format!("reach {} avoid {}", s.reach, s.avoid))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Reach-stay task `((ε, β⁻₀), (p, ¬p))`: avoid `β⁻₀` until committing, then
/// keep `p` true for `hold_steps` consecutive steps.
#[derive(Clone, Debug, PartialEq)]
pub struct StaySequence {
    pub avoid_prelude: BooleanFormula,
    /// An atom or a negated atom.
    pub hold: BooleanFormula,
    pub hold_steps: usize,
}

impl StaySequence {
    pub fn new(
        avoid_prelude: BooleanFormula,
        hold: BooleanFormula,
        hold_steps: usize,
    ) -> Result<Self> {
        let ok = match &hold {
            BooleanFormula::Atom(_) => true,
            BooleanFormula::Not(x) => matches!(**x, BooleanFormula::Atom(_)),
            _ => false,
        };
        if !ok || hold_steps == 0 {
            return Err(Error::InvalidArgument(
                "stay sequences hold a literal for at least one step".into(),
            ));
        }
        Ok(Self {
            avoid_prelude,
            hold,
            hold_steps,
        })
    }

    pub fn hold_atom(&self) -> &PredicateInstance {
        match &self.hold {
            BooleanFormula::Atom(p) => p,
            BooleanFormula::Not(x) => match &**x {
                BooleanFormula::Atom(p) => p,
                _ => unreachable!("checked in new"),
            },
            _ => unreachable!("checked in new"),
        }
    }

    /// The equivalent two-step sequence.
    pub fn as_sequence(&self) -> ReachAvoidSequence {
        let negated = BooleanFormula::Not(Box::new(self.hold.clone()));
        ReachAvoidSequence::new(vec![
            SeqStep {
                reach: Reach::Epsilon(0),
                avoid: self.avoid_prelude.clone(),
                states: None,
            },
            SeqStep::formula(self.hold.clone(), negated),
        ])
    }

    pub fn to_json(&self) -> Value {
        json!({
            "avoid_prelude": self.avoid_prelude.to_string(),
            "hold": self.hold.to_string(),
            "hold_steps": self.hold_steps,
        })
    }
}

/// A training task: either kind of sequence.
#[derive(Clone, Debug, PartialEq)]
pub enum TrainingTask {
    ReachAvoid(ReachAvoidSequence),
    ReachStay(StaySequence),
}

impl TrainingTask {
    pub fn to_json(&self) -> Value {
        match self {
            TrainingTask::ReachAvoid(s) => json!({"type": "reach_avoid", "sequence": s.to_json()}),
            TrainingTask::ReachStay(s) => json!({"type": "reach_stay", "sequence": s.to_json()}),
        }
    }
}

/// Parses a Boolean formula written with `!`, `&`, `|`, `true`, `false` and atoms.
pub fn parse_boolean(text: &str, sig: &Signature) -> Result<BooleanFormula> {
    let f = crate::ltl::parse_ltl(text, sig)?;
    BooleanFormula::from_ltl(&f)
}
