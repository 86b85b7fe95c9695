use super::{AcceptingPath, Edge};
use crate::automata::{Ldba, StateId};

/// All paths from `q` that close into a cycle through an accepting state.
///
/// Depth-first search over the distinct successors of each state, letter
/// targets first (ascending) and then ε edges by id. A successor already on the
/// current path closes it; the path is kept when the re-entered position is at
/// or before the last accepting state seen. The membership test includes the
/// current state, so self-loops close paths too.
pub fn accepting_paths(b: &Ldba, q: StateId) -> Vec<AcceptingPath> {
    let mut out = Vec::new();
    let mut states = Vec::new();
    let mut edges = Vec::new();
    let i = if b.is_accepting(q) { Some(0) } else { None };
    dfs(b, q, &mut states, &mut edges, i, &mut out);
    out
}

fn successors(b: &Ldba, q: StateId) -> Vec<(StateId, Edge)> {
    let mut letters: Vec<StateId> = b.row(q).to_vec();
    letters.sort();
    letters.dedup();
    letters
        .into_iter()
        .map(|t| (t, Edge::Letter))
        .chain(b.epsilon_from(q).map(|(id, t)| (t, Edge::Epsilon(id))))
        .collect()
}

fn dfs(
    b: &Ldba,
    q: StateId,
    states: &mut Vec<StateId>,
    edges: &mut Vec<Edge>,
    last: Option<usize>,
    out: &mut Vec<AcceptingPath>,
) {
    let last = if b.is_accepting(q) {
        Some(states.len())
    } else {
        last
    };
    states.push(q);
    for (t, kind) in successors(b, q) {
        edges.push(kind);
        match states.iter().position(|&s| s == t) {
            Some(idx) => {
                if last.is_some_and(|l| idx <= l) {
                    out.push(AcceptingPath {
                        states: states.clone(),
                        edges: edges.clone(),
                        loopback: idx,
                        last_accepting: last,
                    });
                }
            }
            None => dfs(b, t, states, edges, last, out),
        }
        edges.pop();
    }
    states.pop();
}
