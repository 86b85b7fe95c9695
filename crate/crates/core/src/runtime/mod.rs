//! Product of an environment with an automaton or a training sequence.
//!
//! Environment actions advance the environment and feed `L(s')` to the
//! automaton; ε-actions move the automaton along an ε edge without touching
//! the environment or consuming an assignment. The labelling of the initial
//! environment state is consumed at initialisation, so the automaton always
//! sits in the state reached after reading every label seen so far.

pub mod metrics;
pub mod trace;

use serde::{Deserialize, Serialize};

use crate::automata::{guaranteed_accepting, Ldba, StateId};
use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::ltl::Assignment;
use crate::policies::{Context, Policy};
use crate::taskseq::{sequences_from, Reach, ReachAvoidSequence, TrainingTask};

pub use metrics::{classify_outcome, discounted_accepting_return, Horizon, OutcomeRecord};
pub use trace::{Trace, TraceOutcome, TraceRecord};

#[derive(Clone, Debug, PartialEq)]
pub enum ProductAction<A> {
    Env(A),
    /// Take the ε edge with this id.
    Epsilon(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Terminal {
    None,
    SequenceComplete,
    AvoidViolated,
    Timeout,
    Stuck,
    Unsatisfiable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepOutcome {
    pub reward: i8,
    pub transitioned: bool,
    pub now_accepting: bool,
    pub terminal: Terminal,
}

/// What the product is built against.
#[derive(Clone, Copy, Debug)]
pub enum Task<'a> {
    Automaton(&'a Ldba),
    Training(&'a TrainingTask),
}

/// Runtime bookkeeping; the environment state lives in the environment.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductState {
    pub ldba_state: Option<StateId>,
    /// Environment steps taken.
    pub step_count: usize,
    pub accepting_visits: usize,
    pub avoid_violations: usize,
    pub sequence: ReachAvoidSequence,
    pub cursor: usize,
    pub stay_counter: usize,
    /// The stay task's ε-action has been taken.
    pub committed: bool,
    /// Most recently consumed assignment.
    pub label: Assignment,
}

impl ProductState {
    /// Consumes `L(s_0)` in automaton mode.
    pub fn init<E: Environment>(env: &E, task: Task<'_>) -> Result<Self> {
        let label = env.label()?;
        let mut ps = ProductState {
            ldba_state: None,
            step_count: 0,
            accepting_visits: 0,
            avoid_violations: 0,
            sequence: ReachAvoidSequence::default(),
            cursor: 0,
            stay_counter: 0,
            committed: false,
            label,
        };
        match task {
            Task::Automaton(b) => {
                let q = b.step(b.initial(), &ps.label)?;
                ps.ldba_state = Some(q);
                if b.is_accepting(q) {
                    ps.accepting_visits += 1;
                }
            }
            Task::Training(TrainingTask::ReachAvoid(s)) => ps.sequence = s.clone(),
            Task::Training(TrainingTask::ReachStay(s)) => ps.sequence = s.as_sequence(),
        }
        Ok(ps)
    }

    /// ε edge ids the policy may take now.
    pub fn available_epsilon(&self, task: Task<'_>) -> Vec<usize> {
        match task {
            Task::Automaton(b) => match self.ldba_state {
                Some(q) => b.epsilon_from(q).map(|(id, _)| id).collect(),
                None => vec![],
            },
            Task::Training(TrainingTask::ReachStay(_)) if !self.committed => vec![0],
            Task::Training(_) => vec![],
        }
    }
}

/// One product transition.
pub fn step_product<E: Environment>(
    ps: &mut ProductState,
    action: &ProductAction<E::Action>,
    env: &mut E,
    task: Task<'_>,
) -> Result<StepOutcome> {
    match action {
        ProductAction::Env(a) => {
            env.step(a)?;
            ps.step_count += 1;
            ps.label = env.label()?;
            Ok(match task {
                Task::Automaton(b) => automaton_letter(ps, b)?,
                Task::Training(TrainingTask::ReachAvoid(_)) => training_letter(ps),
                Task::Training(TrainingTask::ReachStay(s)) => {
                    let sigma = &ps.label;
                    if !ps.committed {
                        if s.avoid_prelude.eval(sigma) {
                            ps.avoid_violations += 1;
                            outcome(-1, Terminal::AvoidViolated)
                        } else {
                            outcome(0, Terminal::None)
                        }
                    } else if s.hold.eval(sigma) {
                        ps.stay_counter += 1;
                        if ps.stay_counter >= s.hold_steps {
                            ps.cursor = ps.sequence.len();
                            outcome(1, Terminal::SequenceComplete)
                        } else {
                            outcome(0, Terminal::None)
                        }
                    } else {
                        ps.avoid_violations += 1;
                        outcome(-1, Terminal::AvoidViolated)
                    }
                }
            })
        }
        ProductAction::Epsilon(id) => match task {
            Task::Automaton(b) => {
                let q = ps.ldba_state.expect("automaton mode tracks a state");
                let edge = b
                    .epsilon_edges()
                    .get(*id)
                    .filter(|e| e.from == q)
                    .ok_or(Error::NoEpsilonAvailable(q))?;
                let to = edge.to;
                if matches!(ps.sequence.steps.get(ps.cursor), Some(s) if s.reach == Reach::Epsilon(*id))
                {
                    ps.cursor += 1;
                }
                ps.ldba_state = Some(to);
                let acc = b.is_accepting(to);
                if acc {
                    ps.accepting_visits += 1;
                }
                Ok(StepOutcome {
                    reward: 0,
                    transitioned: to != q,
                    now_accepting: acc,
                    terminal: Terminal::None,
                })
            }
            Task::Training(TrainingTask::ReachStay(_)) if !ps.committed && *id == 0 => {
                ps.committed = true;
                ps.cursor = 1;
                Ok(outcome(0, Terminal::None))
            }
            Task::Training(_) => Err(Error::NoEpsilonAvailable(ps.cursor)),
        },
    }
}

fn outcome(reward: i8, terminal: Terminal) -> StepOutcome {
    StepOutcome {
        reward,
        transitioned: false,
        now_accepting: false,
        terminal,
    }
}

fn training_letter(ps: &mut ProductState) -> StepOutcome {
    let Some(step) = ps.sequence.steps.get(ps.cursor) else {
        return outcome(0, Terminal::SequenceComplete);
    };
    if step.avoid.eval(&ps.label) {
        ps.avoid_violations += 1;
        return outcome(-1, Terminal::AvoidViolated);
    }
    if let Reach::Formula(r) = &step.reach {
        if r.eval(&ps.label) {
            ps.cursor += 1;
            if ps.cursor == ps.sequence.len() {
                return outcome(1, Terminal::SequenceComplete);
            }
        }
    }
    outcome(0, Terminal::None)
}

fn automaton_letter(ps: &mut ProductState, b: &Ldba) -> Result<StepOutcome> {
    let q = ps.ldba_state.expect("automaton mode tracks a state");
    let to = b.step(q, &ps.label)?;
    ps.ldba_state = Some(to);
    let acc = b.is_accepting(to);
    if acc {
        ps.accepting_visits += 1;
    }
    let mut reward = 0;
    if let Some(step) = ps.sequence.steps.get(ps.cursor) {
        if step.avoid.eval(&ps.label) {
            ps.avoid_violations += 1;
            reward = -1;
        } else if let Reach::Formula(r) = &step.reach {
            let matches = match step.states {
                Some((_, t)) => t == to,
                None => r.eval(&ps.label),
            };
            if matches {
                ps.cursor += 1;
                if ps.cursor == ps.sequence.len() {
                    reward = 1;
                }
            }
        }
    }
    Ok(StepOutcome {
        reward,
        transitioned: to != q,
        now_accepting: acc,
        terminal: Terminal::None,
    })
}

/// Ranks candidate sequences; higher is better.
pub trait SequenceScorer {
    fn score(&self, label: &Assignment, seq: &ReachAvoidSequence) -> f64;
}

/// Prefers sequences with fewer assignment-consuming steps.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShortestSequence;

impl SequenceScorer for ShortestSequence {
    fn score(&self, _label: &Assignment, seq: &ReachAvoidSequence) -> f64 {
        -(seq.letter_steps() as f64)
    }
}

/// Argmax under `scorer`, ties broken by the lexicographically smallest state path.
pub fn select_sequence(
    candidates: Vec<ReachAvoidSequence>,
    scorer: &dyn SequenceScorer,
    label: &Assignment,
) -> Option<ReachAvoidSequence> {
    let mut best: Option<(f64, Vec<StateId>, ReachAvoidSequence)> = None;
    for c in candidates {
        let s = scorer.score(label, &c);
        let path = c.state_path();
        let better = match &best {
            None => true,
            Some((bs, bp, _)) => s > *bs || (s == *bs && path < *bp),
        };
        if better {
            best = Some((s, path, c));
        }
    }
    best.map(|(_, _, c)| c)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EpisodeConfig {
    pub max_steps: usize,
    pub k: usize,
    /// Finite-horizon episodes stop once acceptance is guaranteed.
    pub horizon: Horizon,
}

impl EpisodeConfig {
    pub fn new(max_steps: usize) -> Self {
        Self {
            max_steps,
            k: crate::taskseq::DEFAULT_K,
            horizon: Horizon::Finite,
        }
    }
}

/// Runs one episode from the environment's current state.
pub fn run_episode<E: Environment>(
    env: &mut E,
    task: Task<'_>,
    policy: &mut dyn Policy<E>,
    scorer: &dyn SequenceScorer,
    config: &EpisodeConfig,
) -> Result<Trace> {
    let mut ps = ProductState::init(env, task)?;
    let guaranteed = match task {
        Task::Automaton(b) => guaranteed_accepting(b),
        Task::Training(_) => vec![],
    };
    let mut records = Vec::new();
    let mut conditioned: Option<StateId> = None;
    let mut guaranteed_at = None;
    let terminal = loop {
        if let (Task::Automaton(b), Some(q)) = (task, ps.ldba_state) {
            if guaranteed[q] && guaranteed_at.is_none() {
                guaranteed_at = Some(ps.step_count);
            }
            // A finished sequence is re-extracted from the same state.
            if conditioned != Some(q) || ps.cursor >= ps.sequence.len() {
                conditioned = Some(q);
                match select_sequence(sequences_from(b, q, config.k), scorer, &ps.label) {
                    Some(s) => {
                        ps.sequence = s;
                        ps.cursor = 0;
                    }
                    None => break Terminal::Unsatisfiable,
                }
            }
            if guaranteed[q] && config.horizon == Horizon::Finite {
                break Terminal::SequenceComplete;
            }
        }
        if ps.step_count >= config.max_steps {
            break Terminal::Timeout;
        }
        let eps = ps.available_epsilon(task);
        let ctx = Context {
            sequence: &ps.sequence,
            cursor: ps.cursor,
            epsilon: &eps,
            label: &ps.label,
        };
        let Some(action) = policy.act(env, &ctx) else {
            break Terminal::Stuck;
        };
        let mut rec = TraceRecord {
            t: records.len(),
            env_time: ps.step_count,
            state: env.summary(),
            sigma: ps.label.iter().map(|p| p.to_string()).collect(),
            q: ps.ldba_state,
            accepting: is_accepting(task, ps.ldba_state),
            action: match &action {
                ProductAction::Env(a) => env.action_json(a),
                ProductAction::Epsilon(id) => serde_json::json!({ "epsilon": id }),
            },
            epsilon: matches!(action, ProductAction::Epsilon(_)),
            reward: 0,
        };
        let out = step_product(&mut ps, &action, env, task)?;
        rec.reward = out.reward;
        records.push(rec);
        if out.terminal != Terminal::None {
            break out.terminal;
        }
    };
    if let (Task::Automaton(_), Some(q)) = (task, ps.ldba_state) {
        if guaranteed[q] && guaranteed_at.is_none() {
            guaranteed_at = Some(ps.step_count);
        }
    }
    Ok(Trace {
        records,
        outcome: TraceOutcome {
            terminal,
            env_steps: ps.step_count,
            accepting_visits: ps.accepting_visits,
            avoid_violations: ps.avoid_violations,
            guaranteed_at,
            final_state: ps.ldba_state,
            final_accepting: is_accepting(task, ps.ldba_state),
        },
    })
}

fn is_accepting(task: Task<'_>, q: Option<StateId>) -> bool {
    match (task, q) {
        (Task::Automaton(b), Some(q)) => b.is_accepting(q),
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::persist_or_reach;
    use crate::automata::{translate, Alphabet, Component};
    use crate::envs::{LetterOracle, ScriptedEnv};
    use crate::ltl::{parse_ltl, BooleanFormula, PredicateInstance, Signature};
    use crate::policies::RandomPolicy;
    use crate::taskseq::{SeqStep, StaySequence};

    fn p(n: &str) -> PredicateInstance {
        PredicateInstance::prop(n)
    }

    fn letter(n: &str) -> Assignment {
        Assignment::singleton(p(n))
    }

    fn scripted(names: &[&str]) -> ScriptedEnv {
        ScriptedEnv::new(names.iter().map(|n| p(n)), Assignment::empty())
    }

    fn ltl(s: &str) -> Ldba {
        translate(&parse_ltl(s, &Signature::permissive()).unwrap()).unwrap()
    }

    #[test]
    fn epsilon_keeps_environment_state() {
        let b = persist_or_reach();
        let mut env = scripted(&["a", "b"]);
        let mut ps = ProductState::init(&env, Task::Automaton(&b)).unwrap();
        assert_eq!(ps.ldba_state, Some(0));
        let before = env.state().clone();
        let out = step_product(
            &mut ps,
            &ProductAction::Epsilon(0),
            &mut env,
            Task::Automaton(&b),
        )
        .unwrap();
        assert_eq!(ps.ldba_state, Some(2));
        assert_eq!(env.state(), &before);
        assert_eq!(ps.step_count, 0);
        assert!(out.transitioned && out.now_accepting);
        assert_eq!(ps.accepting_visits, 1);
        let again = step_product(
            &mut ps,
            &ProductAction::Epsilon(0),
            &mut env,
            Task::Automaton(&b),
        );
        assert_eq!(again, Err(Error::NoEpsilonAvailable(2)));
    }

    #[test]
    fn completing_a_training_sequence_pays_one() {
        let task = TrainingTask::ReachAvoid(ReachAvoidSequence::new(vec![SeqStep::formula(
            BooleanFormula::Atom(p("b")),
            BooleanFormula::False,
        )]));
        let mut env = scripted(&["a", "b"]);
        let mut ps = ProductState::init(&env, Task::Training(&task)).unwrap();
        let a = step_product(
            &mut ps,
            &ProductAction::Env(letter("a")),
            &mut env,
            Task::Training(&task),
        )
        .unwrap();
        assert_eq!((a.reward, a.terminal), (0, Terminal::None));
        let b = step_product(
            &mut ps,
            &ProductAction::Env(letter("b")),
            &mut env,
            Task::Training(&task),
        )
        .unwrap();
        assert_eq!((b.reward, b.terminal), (1, Terminal::SequenceComplete));
    }

    #[test]
    fn entering_the_avoid_set_costs_one() {
        let task = TrainingTask::ReachAvoid(ReachAvoidSequence::new(vec![SeqStep::formula(
            BooleanFormula::Atom(p("b")),
            BooleanFormula::Atom(p("c")),
        )]));
        let mut env = scripted(&["b", "c"]);
        let mut ps = ProductState::init(&env, Task::Training(&task)).unwrap();
        let out = step_product(
            &mut ps,
            &ProductAction::Env(letter("c")),
            &mut env,
            Task::Training(&task),
        )
        .unwrap();
        assert_eq!((out.reward, out.terminal), (-1, Terminal::AvoidViolated));
    }

    #[test]
    fn stay_task_needs_commit_then_hold() {
        let stay = StaySequence::new(
            BooleanFormula::Atom(p("c")),
            BooleanFormula::Atom(p("a")),
            3,
        )
        .unwrap();
        let task = TrainingTask::ReachStay(stay);
        let t = Task::Training(&task);
        let mut env = scripted(&["a", "c"]);
        let mut ps = ProductState::init(&env, t).unwrap();
        assert_eq!(ps.available_epsilon(t), vec![0]);
        // Visiting `a` before committing does not count.
        step_product(&mut ps, &ProductAction::Env(letter("a")), &mut env, t).unwrap();
        step_product(&mut ps, &ProductAction::Epsilon(0), &mut env, t).unwrap();
        assert!(ps.available_epsilon(t).is_empty());
        for i in 0..3 {
            let out = step_product(&mut ps, &ProductAction::Env(letter("a")), &mut env, t).unwrap();
            let expected = if i == 2 {
                (1, Terminal::SequenceComplete)
            } else {
                (0, Terminal::None)
            };
            assert_eq!((out.reward, out.terminal), expected);
        }
        let mut env = scripted(&["a", "c"]);
        let mut ps = ProductState::init(&env, t).unwrap();
        step_product(&mut ps, &ProductAction::Epsilon(0), &mut env, t).unwrap();
        let out = step_product(
            &mut ps,
            &ProductAction::Env(Assignment::empty()),
            &mut env,
            t,
        )
        .unwrap();
        assert_eq!((out.reward, out.terminal), (-1, Terminal::AvoidViolated));
    }

    #[test]
    fn shortest_scorer_prefers_the_epsilon_branch() {
        let b = persist_or_reach();
        let mut env = scripted(&["a", "b"]);
        let cfg = EpisodeConfig {
            max_steps: 10,
            k: 2,
            horizon: Horizon::Infinite,
        };
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut LetterOracle,
            &ShortestSequence,
            &cfg,
        )
        .unwrap();
        // `a` is reached first so that the ε edge is taken where `a` holds.
        assert!(!trace.records[0].epsilon);
        assert!(trace.records[1].epsilon);
        assert_eq!(trace.records.iter().filter(|r| r.epsilon).count(), 1);
        assert_eq!(trace.outcome.final_state, Some(2));
        assert_eq!(trace.outcome.accepting_visits, 10);
        assert_eq!(trace.outcome.terminal, Terminal::Timeout);
    }

    #[test]
    fn empty_accepting_set_is_unsatisfiable() {
        let s = Alphabet::at_most_one([p("a")]);
        let b = Ldba::new(
            s,
            0,
            vec![false],
            vec![Component::Initial],
            vec![vec![0, 0]],
            vec![],
            vec!["q0".into()],
            false,
        )
        .unwrap();
        let mut env = scripted(&["a"]);
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut LetterOracle,
            &ShortestSequence,
            &EpisodeConfig::new(5),
        )
        .unwrap();
        assert_eq!(trace.outcome.terminal, Terminal::Unsatisfiable);
        assert!(trace.records.is_empty());
    }

    #[test]
    fn random_policy_times_out() {
        let b = ltl("F b()");
        let mut env = scripted(&["a"]);
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut RandomPolicy::new(0),
            &ShortestSequence,
            &EpisodeConfig::new(25),
        )
        .unwrap();
        assert_eq!(trace.outcome.terminal, Terminal::Timeout);
        assert_eq!(trace.outcome.env_steps, 25);
        assert!(!classify_outcome(&trace, Horizon::Finite).success);
    }

    #[test]
    fn oracle_satisfies_reach_and_reports_steps() {
        let b = ltl("F (a() & F b())");
        let mut env = scripted(&["a", "b"]);
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut LetterOracle,
            &ShortestSequence,
            &EpisodeConfig::new(50),
        )
        .unwrap();
        assert_eq!(trace.outcome.terminal, Terminal::SequenceComplete);
        let rec = classify_outcome(&trace, Horizon::Finite);
        assert!(rec.success);
        assert_eq!(rec.steps, Some(2));
    }

    #[test]
    fn monitor_agrees_with_folding_delta() {
        let b = ltl("G (a() -> F b()) & F c()");
        let mut env = scripted(&["a", "b", "c"]);
        let cfg = EpisodeConfig {
            max_steps: 200,
            k: 2,
            horizon: Horizon::Infinite,
        };
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut RandomPolicy::new(4),
            &ShortestSequence,
            &cfg,
        )
        .unwrap();
        let mut q = b.step(b.initial(), &Assignment::empty()).unwrap();
        for (i, r) in trace.records.iter().enumerate() {
            assert_eq!(r.q, Some(q));
            let next = trace.records.get(i + 1);
            if r.epsilon {
                let id = r.action["epsilon"].as_u64().unwrap() as usize;
                q = b.epsilon_edges()[id].to;
            } else {
                let sigma: Assignment = match next {
                    Some(n) => n
                        .sigma
                        .iter()
                        .map(|s| p(s.trim_end_matches("()")))
                        .collect(),
                    None => env.label().unwrap(),
                };
                q = b.step(q, &sigma).unwrap();
            }
        }
        assert_eq!(trace.outcome.final_state, Some(q));
    }

    fn flags_trace(flags: &[bool]) -> Trace {
        let (last, body) = flags.split_last().unwrap();
        Trace {
            records: body
                .iter()
                .enumerate()
                .map(|(t, &accepting)| TraceRecord {
                    t,
                    env_time: t,
                    state: serde_json::Value::Null,
                    sigma: vec![],
                    q: Some(0),
                    accepting,
                    action: serde_json::Value::Null,
                    epsilon: false,
                    reward: 0,
                })
                .collect(),
            outcome: TraceOutcome {
                terminal: Terminal::Timeout,
                env_steps: body.len(),
                accepting_visits: flags.iter().filter(|&&f| f).count(),
                avoid_violations: 0,
                guaranteed_at: None,
                final_state: Some(0),
                final_accepting: *last,
            },
        }
    }

    #[test]
    fn discounted_return_examples() {
        let t = flags_trace(&[true, false, false]);
        assert_eq!(discounted_accepting_return(&t, 0.9).unwrap(), 1.0);
        let t = flags_trace(&[true, true, true]);
        assert_eq!(discounted_accepting_return(&t, 0.5).unwrap(), 1.75);
        let t = flags_trace(&[false, false]);
        assert_eq!(discounted_accepting_return(&t, 0.5).unwrap(), 0.0);
        assert!(discounted_accepting_return(&t, 1.0).is_err());
        assert!(discounted_accepting_return(&t, -0.1).is_err());
    }

    #[test]
    fn recurrence_counts_accepting_visits() {
        let b = ltl("G F a()");
        let mut env = scripted(&["a"]);
        // Alternate a and ∅ so the accepting state is entered every other step.
        struct Alternate;
        impl Policy<ScriptedEnv> for Alternate {
            fn act(
                &mut self,
                env: &ScriptedEnv,
                ctx: &Context<'_>,
            ) -> Option<ProductAction<Assignment>> {
                if let Some(&id) = ctx.epsilon.first() {
                    return Some(ProductAction::Epsilon(id));
                }
                let next = if env.state().time % 2 == 0 {
                    letter("a")
                } else {
                    Assignment::empty()
                };
                Some(ProductAction::Env(next))
            }
        }
        let cfg = EpisodeConfig {
            max_steps: 24,
            k: 2,
            horizon: Horizon::Infinite,
        };
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut Alternate,
            &ShortestSequence,
            &cfg,
        )
        .unwrap();
        let visits = trace.accepting_flags().iter().filter(|&&f| f).count();
        assert_eq!(
            classify_outcome(&trace, Horizon::Infinite).accepting_visits,
            visits
        );
        assert_eq!(visits, 12);
    }

    #[test]
    fn trace_serializes_as_json_and_ndjson() {
        let b = ltl("F a()");
        let mut env = scripted(&["a"]);
        let trace = run_episode(
            &mut env,
            Task::Automaton(&b),
            &mut LetterOracle,
            &ShortestSequence,
            &EpisodeConfig::new(5),
        )
        .unwrap();
        let v = trace.to_json();
        assert_eq!(v["outcome"]["terminal"], "sequence_complete");
        assert_eq!(trace.to_ndjson().lines().count(), trace.records.len() + 1);
    }
}
