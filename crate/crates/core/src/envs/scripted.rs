//! An environment whose action is the next assignment.
//!
//! Useful for driving an automaton with chosen words: the state is just the
//! environment time and the current assignment.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::Environment;
use crate::error::{Error, Result};
use crate::ltl::{Assignment, PredicateInstance};
use crate::policies::{resolve, Context, Goal, Policy};
use crate::runtime::ProductAction;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScriptedState {
    pub time: usize,
    pub current: Assignment,
}

/// Letters are `∅` and each singleton of `active`.
#[derive(Clone, Debug)]
pub struct ScriptedEnv {
    active: Vec<PredicateInstance>,
    state: ScriptedState,
}

impl ScriptedEnv {
    pub fn new(active: impl IntoIterator<Item = PredicateInstance>, initial: Assignment) -> Self {
        let mut active: Vec<_> = active.into_iter().collect();
        active.sort();
        active.dedup();
        Self {
            active,
            state: ScriptedState {
                time: 0,
                current: initial,
            },
        }
    }

    pub fn letters(&self) -> Vec<Assignment> {
        std::iter::once(Assignment::empty())
            .chain(self.active.iter().cloned().map(Assignment::singleton))
            .collect()
    }
}

impl Environment for ScriptedEnv {
    type Action = Assignment;
    type State = ScriptedState;

    fn state(&self) -> &ScriptedState {
        &self.state
    }

    fn step(&mut self, action: &Assignment) -> Result<()> {
        if action.len() > 1 || action.iter().any(|p| !self.active.contains(p)) {
            return Err(Error::InvalidAction(format!("{action} is not a letter")));
        }
        self.state.time += 1;
        self.state.current = action.clone();
        Ok(())
    }

    fn label(&self) -> Result<Assignment> {
        Ok(self.state.current.clone())
    }

    fn active(&self) -> &[PredicateInstance] {
        &self.active
    }

    fn sample_action(&self, rng: &mut ChaCha8Rng) -> Assignment {
        let letters = self.letters();
        letters[rng.gen_range(0..letters.len())].clone()
    }

    fn action_json(&self, action: &Assignment) -> Value {
        json!(action.to_string())
    }

    fn summary(&self) -> Value {
        json!({ "time": self.state.time })
    }

    fn snapshot(&self) -> Value {
        json!({ "time": self.state.time, "current": self.state.current.to_string() })
    }
}

/// Picks the first letter that satisfies the active reach formula without
/// touching its avoid formula.
#[derive(Clone, Copy, Debug, Default)]
pub struct LetterOracle;

impl Policy<ScriptedEnv> for LetterOracle {
    fn act(&mut self, env: &ScriptedEnv, ctx: &Context<'_>) -> Option<ProductAction<Assignment>> {
        match resolve(ctx)? {
            Goal::Idle => Some(ProductAction::Env(env.state.current.clone())),
            Goal::Epsilon(id) => Some(ProductAction::Epsilon(id)),
            Goal::Pursue { reach, avoid } => env
                .letters()
                .into_iter()
                .find(|l| reach.eval(l) && !avoid.eval(l))
                .map(ProductAction::Env),
        }
    }
}
