//! Graph-level facts about an automaton that the sequence extractor and the
//! evaluator rely on.

use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};

use super::ldba::{Ldba, StateId};

/// Edge kinds in the state graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Kind {
    Letter,
    Epsilon,
}

fn state_graph(b: &Ldba, with_epsilon: bool) -> DiGraph<StateId, Kind> {
    let mut g = DiGraph::with_capacity(b.num_states(), 0);
    for q in b.states() {
        g.add_node(q);
    }
    for q in b.states() {
        let mut ts = b.row(q).to_vec();
        ts.sort();
        ts.dedup();
        for t in ts {
            g.add_edge(NodeIndex::new(q), NodeIndex::new(t), Kind::Letter);
        }
        if with_epsilon {
            for (_, t) in b.epsilon_from(q) {
                g.add_edge(NodeIndex::new(q), NodeIndex::new(t), Kind::Epsilon);
            }
        }
    }
    g
}

fn backward_closure(b: &Ldba, g: &DiGraph<StateId, Kind>, seeds: &[StateId]) -> Vec<bool> {
    let mut mark = vec![false; b.num_states()];
    let mut stack: Vec<StateId> = seeds.to_vec();
    for &s in seeds {
        mark[s] = true;
    }
    while let Some(q) = stack.pop() {
        for p in g.neighbors_directed(NodeIndex::new(q), petgraph::Direction::Incoming) {
            if !mark[p.index()] {
                mark[p.index()] = true;
                stack.push(p.index());
            }
        }
    }
    mark
}

/// States lying on a cycle that visits an accepting state and consumes at least
/// one letter.
pub fn accepting_cycle_states(b: &Ldba) -> Vec<bool> {
    let g = state_graph(b, true);
    let mut on = vec![false; b.num_states()];
    for scc in tarjan_scc(&g) {
        let members: Vec<StateId> = scc.iter().map(|n| n.index()).collect();
        let inside = |x: NodeIndex| members.contains(&x.index());
        let has_letter_edge = scc.iter().any(|&n| {
            g.edges(n).any(|e| {
                *e.weight() == Kind::Letter && inside(petgraph::visit::EdgeRef::target(&e))
            })
        });
        if has_letter_edge && members.iter().any(|&q| b.is_accepting(q)) {
            for q in members {
                on[q] = true;
            }
        }
    }
    on
}

/// Rejecting sinks: states from which no accepting cycle is reachable.
pub fn rejecting_sinks(b: &Ldba) -> Vec<bool> {
    let g = state_graph(b, true);
    let seeds: Vec<StateId> = accepting_cycle_states(b)
        .iter()
        .enumerate()
        .filter(|(_, &x)| x)
        .map(|(q, _)| q)
        .collect();
    backward_closure(b, &g, &seeds)
        .into_iter()
        .map(|live| !live)
        .collect()
}

/// States from which every infinite letter-run is accepting, or from which an ε
/// edge leads to such a state. Entering one of these means the task is settled
/// whatever happens next.
pub fn guaranteed_accepting(b: &Ldba) -> Vec<bool> {
    let n = b.num_states();
    let g = state_graph(b, false);
    // A letter-run is rejecting iff it eventually stays inside non-accepting
    // states, i.e. it reaches a cycle of non-accepting states.
    let mut bad_cycle = vec![false; n];
    for scc in tarjan_scc(&g) {
        let members: Vec<StateId> = scc.iter().map(|x| x.index()).collect();
        let nonacc: Vec<StateId> = members
            .iter()
            .copied()
            .filter(|&q| !b.is_accepting(q))
            .collect();
        if nonacc.is_empty() {
            continue;
        }
        // Cycles within the non-accepting part of this SCC.
        let mut sub = DiGraph::<StateId, ()>::new();
        let idx: Vec<NodeIndex> = nonacc.iter().map(|&q| sub.add_node(q)).collect();
        for (i, &q) in nonacc.iter().enumerate() {
            for (j, &t) in nonacc.iter().enumerate() {
                if b.row(q).contains(&t) {
                    sub.add_edge(idx[i], idx[j], ());
                }
            }
        }
        for c in tarjan_scc(&sub) {
            let cyclic = c.len() > 1 || sub.contains_edge(c[0], c[0]);
            if cyclic {
                for x in c {
                    bad_cycle[nonacc[x.index()]] = true;
                }
            }
        }
    }
    let seeds: Vec<StateId> = (0..n).filter(|&q| bad_cycle[q]).collect();
    let mut good: Vec<bool> = backward_closure(b, &g, &seeds)
        .into_iter()
        .map(|x| !x)
        .collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            if !good[q] && b.epsilon_from(q).any(|(_, t)| good[t]) {
                good[q] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    good
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::persist_or_reach;

    #[test]
    fn sinks_of_persist_or_reach() {
        let b = persist_or_reach();
        assert_eq!(rejecting_sinks(&b), vec![false, false, false, true]);
        assert_eq!(accepting_cycle_states(&b), vec![false, true, true, false]);
    }

    #[test]
    fn guaranteed_region() {
        let b = persist_or_reach();
        // q1 is an accepting sink; q2 can fall into q3; q0 may loop forever.
        assert_eq!(guaranteed_accepting(&b), vec![false, true, false, false]);
    }
}
