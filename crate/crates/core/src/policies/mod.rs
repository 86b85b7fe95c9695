//! Scripted policies and evaluation formula templates.

pub mod planner;
pub mod random;
pub mod steer;
pub mod templates;

use crate::envs::Environment;
use crate::ltl::{Assignment, BooleanFormula};
use crate::runtime::ProductAction;
use crate::taskseq::{Reach, ReachAvoidSequence};

pub use planner::{fallout_task_feasible, plan_fallout, quiet_path, shortest_path, FalloutPlanner};
pub use random::RandomPolicy;
pub use steer::{steer_rgbzone, SteerMode, ZoneSteering};
pub use templates::{instantiate_template, template, FormulaTemplate, TEMPLATES};

/// What a policy sees besides the environment.
#[derive(Clone, Copy, Debug)]
pub struct Context<'a> {
    pub sequence: &'a ReachAvoidSequence,
    pub cursor: usize,
    /// Ids of the ε edges leaving the current automaton state.
    pub epsilon: &'a [usize],
    /// Most recently consumed assignment.
    pub label: &'a Assignment,
}

impl Context<'_> {
    pub fn active_step(&self) -> Option<&crate::taskseq::SeqStep> {
        self.sequence.steps.get(self.cursor)
    }
}

/// What a scripted policy should do about the active step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Goal<'a> {
    Idle,
    Epsilon(usize),
    Pursue {
        reach: &'a BooleanFormula,
        avoid: &'a BooleanFormula,
    },
}

/// An ε step is taken once the step after it already holds; until then that
/// step's reach formula is pursued under the ε step's avoid formula. `None`
/// means the requested ε edge is unavailable.
pub fn resolve<'a>(ctx: &Context<'a>) -> Option<Goal<'a>> {
    let steps = &ctx.sequence.steps;
    let Some(step) = steps.get(ctx.cursor) else {
        return Some(Goal::Idle);
    };
    match &step.reach {
        Reach::Formula(r) => Some(Goal::Pursue {
            reach: r,
            avoid: &step.avoid,
        }),
        Reach::Epsilon(id) => {
            if !ctx.epsilon.contains(id) {
                return None;
            }
            match steps.get(ctx.cursor + 1).map(|n| &n.reach) {
                Some(Reach::Formula(next)) if !next.eval(ctx.label) => Some(Goal::Pursue {
                    reach: next,
                    avoid: &step.avoid,
                }),
                _ => Some(Goal::Epsilon(*id)),
            }
        }
    }
}

pub trait Policy<E: Environment> {
    /// Next action, or `None` when the policy is stuck.
    fn act(&mut self, env: &E, ctx: &Context<'_>) -> Option<ProductAction<E::Action>>;
}
