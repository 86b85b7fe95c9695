use std::collections::{HashMap, VecDeque};

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{resolve, Context, Goal, Policy};
use crate::automata::{Ldba, StateId};
use crate::envs::Environment;
use crate::envs::{FalloutAction, FalloutWorld};
use crate::ltl::BooleanFormula;
use crate::runtime::ProductAction;

type Cell = (usize, usize);

const MOVES: [FalloutAction; 4] = [
    FalloutAction::Up,
    FalloutAction::Down,
    FalloutAction::Left,
    FalloutAction::Right,
];

/// Shortest 4-connected path from the agent to a cell where `reach` holds and
/// `avoid` does not, never entering a cell where `avoid` holds. The start is
/// included; a single-cell path means the agent is already there.
pub fn shortest_path(
    world: &FalloutWorld,
    reach: &BooleanFormula,
    avoid: &BooleanFormula,
) -> Option<Vec<Cell>> {
    bfs(world, reach, &|c| avoid.eval(&world.label_at(c)))
}

/// Like [`shortest_path`], but first tries to avoid every labelled cell that
/// is not a goal. Such cells may move the automaton elsewhere without
/// violating the step, which can trap a plain shortest path in a cycle.
pub fn quiet_path(
    world: &FalloutWorld,
    reach: &BooleanFormula,
    avoid: &BooleanFormula,
) -> Option<Vec<Cell>> {
    bfs(world, reach, &|c| {
        let l = world.label_at(c);
        avoid.eval(&l) || (!l.is_empty() && !reach.eval(&l))
    })
    .or_else(|| shortest_path(world, reach, avoid))
}

fn bfs(
    world: &FalloutWorld,
    reach: &BooleanFormula,
    blocked: &dyn Fn(Cell) -> bool,
) -> Option<Vec<Cell>> {
    let st = world.state();
    let n = st.size;
    let goal = |c: Cell| !blocked(c) && reach.eval(&world.label_at(c));
    let mut parent: Vec<Option<Cell>> = vec![None; n * n];
    let mut seen = vec![false; n * n];
    let start = st.agent;
    seen[start.1 * n + start.0] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(c) = queue.pop_front() {
        if goal(c) {
            let mut path = vec![c];
            let mut cur = c;
            while let Some(p) = parent[cur.1 * n + cur.0] {
                path.push(p);
                cur = p;
            }
            path.reverse();
            return Some(path);
        }
        for a in MOVES {
            let d = st.moved(c, a);
            let i = d.1 * n + d.0;
            if !seen[i] && !blocked(d) {
                seen[i] = true;
                parent[i] = Some(c);
                queue.push_back(d);
            }
        }
    }
    None
}

fn direction(from: Cell, to: Cell) -> FalloutAction {
    MOVES
        .into_iter()
        .find(|&a| {
            let (dx, dy) = a.delta();
            (from.0 as i64 + dx, from.1 as i64 + dy) == (to.0 as i64, to.1 as i64)
        })
        .expect("path cells are adjacent")
}

/// BFS oracle move for the active step; `None` when no safe path exists.
pub fn plan_fallout(
    world: &FalloutWorld,
    ctx: &Context<'_>,
) -> Option<ProductAction<FalloutAction>> {
    match resolve(ctx)? {
        Goal::Idle => Some(ProductAction::Env(FalloutAction::Stay)),
        Goal::Epsilon(id) => Some(ProductAction::Epsilon(id)),
        Goal::Pursue { reach, avoid } => {
            let path = quiet_path(world, reach, avoid)?;
            Some(ProductAction::Env(match path.as_slice() {
                [_] => FalloutAction::Stay,
                [a, b, ..] => direction(*a, *b),
                [] => unreachable!("paths include the start"),
            }))
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FalloutPlanner;

impl Policy<FalloutWorld> for FalloutPlanner {
    fn act(
        &mut self,
        env: &FalloutWorld,
        ctx: &Context<'_>,
    ) -> Option<ProductAction<FalloutAction>> {
        plan_fallout(env, ctx)
    }
}

/// Whether some run of the grid and automaton product from the current cell
/// reaches an accepting cycle. Cells whose labels break the at-most-one
/// alphabet are impassable.
pub fn fallout_task_feasible(world: &FalloutWorld, b: &Ldba) -> bool {
    let st = world.state();
    let Ok(q0) = b.step(b.initial(), &world.label_at(st.agent)) else {
        return false;
    };
    let mut g: DiGraph<(Cell, StateId), ()> = DiGraph::new();
    let mut index: HashMap<(Cell, StateId), NodeIndex> = HashMap::new();
    let start = (st.agent, q0);
    index.insert(start, g.add_node(start));
    let mut queue = VecDeque::from([start]);
    while let Some((c, q)) = queue.pop_front() {
        let from = index[&(c, q)];
        let mut succ: Vec<(Cell, StateId)> = FalloutAction::ALL
            .iter()
            .filter_map(|&a| {
                let d = st.moved(c, a);
                b.step(q, &world.label_at(d)).ok().map(|t| (d, t))
            })
            .collect();
        succ.extend(b.epsilon_from(q).map(|(_, t)| (c, t)));
        for node in succ {
            let to = *index.entry(node).or_insert_with(|| {
                queue.push_back(node);
                g.add_node(node)
            });
            g.update_edge(from, to, ());
        }
    }
    tarjan_scc(&g).iter().any(|scc| {
        let cyclic = scc.len() > 1 || g.contains_edge(scc[0], scc[0]);
        cyclic && scc.iter().any(|&v| b.is_accepting(g[v].1))
    })
}

#[cfg(test)]
mod tests {
    use serde_json::json;

    use super::*;
    use crate::envs::{FalloutConfig, FalloutState};
    use crate::ltl::{Assignment, PredicateInstance};
    use crate::taskseq::{ReachAvoidSequence, SeqStep};

    fn loc(x: usize, y: usize) -> PredicateInstance {
        PredicateInstance::parse_free("loc", &[x as f64, y as f64]).unwrap()
    }

    fn rad(t: f64) -> PredicateInstance {
        PredicateInstance::parse_free("rad", &[t]).unwrap()
    }

    fn world(agent: Cell, field: Vec<f64>, atoms: Vec<PredicateInstance>) -> FalloutWorld {
        let snap = json!({ "state": FalloutState { size: 21, agent, field }, "active": atoms });
        FalloutWorld::restore(&FalloutConfig::default(), &snap).unwrap()
    }

    fn act(w: &FalloutWorld, seq: &ReachAvoidSequence) -> Option<ProductAction<FalloutAction>> {
        let label = w.label().unwrap();
        plan_fallout(
            w,
            &Context {
                sequence: seq,
                cursor: 0,
                epsilon: &[],
                label: &label,
            },
        )
    }

    fn reach(p: PredicateInstance, avoid: BooleanFormula) -> ReachAvoidSequence {
        ReachAvoidSequence::new(vec![SeqStep::formula(BooleanFormula::Atom(p), avoid)])
    }

    #[test]
    fn adjacent_goal_moves_up() {
        let w = world((3, 2), vec![0.0; 441], vec![loc(3, 3)]);
        let a = act(&w, &reach(loc(3, 3), BooleanFormula::False));
        assert_eq!(a, Some(ProductAction::Env(FalloutAction::Up)));
    }

    #[test]
    fn satisfied_goal_stays() {
        let w = world((3, 3), vec![0.0; 441], vec![loc(3, 3)]);
        let a = act(&w, &reach(loc(3, 3), BooleanFormula::False));
        assert_eq!(a, Some(ProductAction::Env(FalloutAction::Stay)));
    }

    #[test]
    fn detours_around_radiation() {
        // A wall at x = 5 except for a gap at y = 20.
        let mut field = vec![0.0; 441];
        for y in 0..20 {
            field[y * 21 + 5] = 0.9;
        }
        let mut w = world((0, 0), field, vec![loc(10, 0), rad(0.5)]);
        let seq = reach(loc(10, 0), BooleanFormula::Atom(rad(0.5)));
        let path = shortest_path(
            &w,
            &BooleanFormula::Atom(loc(10, 0)),
            &BooleanFormula::Atom(rad(0.5)),
        )
        .unwrap();
        assert_eq!(path.len(), 1 + 20 + 10 + 20);
        for _ in 0..100 {
            match act(&w, &seq).unwrap() {
                ProductAction::Env(a) => w.step(&a).unwrap(),
                ProductAction::Epsilon(_) => unreachable!(),
            }
            assert!(w.state().intensity(w.state().agent) <= 0.5);
        }
        assert_eq!(w.state().agent, (10, 0));
    }

    #[test]
    fn quiet_path_steps_around_other_atoms() {
        let w = world((0, 0), vec![0.0; 441], vec![loc(4, 0), loc(2, 0)]);
        let goal = BooleanFormula::Atom(loc(4, 0));
        let plain = shortest_path(&w, &goal, &BooleanFormula::False).unwrap();
        assert!(plain.contains(&(2, 0)));
        let quiet = quiet_path(&w, &goal, &BooleanFormula::False).unwrap();
        assert!(!quiet.contains(&(2, 0)));
        assert_eq!(quiet.len(), plain.len() + 2);
    }

    #[test]
    fn walled_off_goal_is_stuck() {
        let mut field = vec![0.0; 441];
        for y in 0..21 {
            field[y * 21 + 5] = 0.9;
        }
        let w = world((0, 0), field, vec![loc(10, 0), rad(0.5)]);
        assert_eq!(
            act(&w, &reach(loc(10, 0), BooleanFormula::Atom(rad(0.5)))),
            None
        );
        assert_eq!(w.label().unwrap(), Assignment::empty());
    }
}
