use super::avoid::mark_avoid_with;
use super::{accepting_paths, AcceptingPath, Edge, Reach, ReachAvoidSequence, SeqStep};
use crate::automata::{rejecting_sinks, Ldba, StateId};

/// Number of accepting visits a truncated sequence must cover.
pub const DEFAULT_K: usize = 2;

/// Unrolls `path` around its cycle until accepting states have been entered
/// `k` times, producing one `(β⁺, β⁻)` pair per step.
pub fn build_sequence(b: &Ldba, path: &AcceptingPath, k: usize) -> ReachAvoidSequence {
    build_with(b, path, k, &rejecting_sinks(b))
}

/// Sequences for every accepting path from `q`, in search order.
pub fn sequences_from(b: &Ldba, q: StateId, k: usize) -> Vec<ReachAvoidSequence> {
    let sinks = rejecting_sinks(b);
    accepting_paths(b, q)
        .iter()
        .map(|p| build_with(b, p, k, &sinks))
        .collect()
}

fn build_with(b: &Ldba, path: &AcceptingPath, k: usize, sinks: &[bool]) -> ReachAvoidSequence {
    let k = k.max(1);
    let avoid = mark_avoid_with(path, sinks);
    let mut steps = Vec::new();
    let mut pos = 0;
    let mut entries = 0;
    // Every lap of the cycle enters an accepting state, so this always ends.
    while entries < k {
        let next = path.next_index(pos);
        let (from, to) = (path.states[pos], path.states[next]);
        let reach = match path.edges[pos] {
            Edge::Letter => Reach::Formula(b.guard_where(from, |t| t == to)),
            Edge::Epsilon(id) => Reach::Epsilon(id),
        };
        let avoid_here = &avoid[pos];
        steps.push(SeqStep {
            reach,
            avoid: b.guard_where(from, |t| avoid_here.contains(&t)),
            states: Some((from, to)),
        });
        if b.is_accepting(to) {
            entries += 1;
        }
        pos = next;
    }
    ReachAvoidSequence {
        steps,
        origin: path.states.first().copied(),
    }
}
