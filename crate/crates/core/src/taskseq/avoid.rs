use std::collections::BTreeSet;

use super::AcceptingPath;
use crate::automata::{rejecting_sinks, Ldba, StateId};

/// Avoid sets for each position of `path`.
///
/// Entry `i` is for the edge leaving `path.states[i]`: the automaton's
/// rejecting sinks plus every state at an earlier path position (falling back
/// along the path), never including the step's own source and target.
pub fn mark_avoid(b: &Ldba, path: &AcceptingPath) -> Vec<BTreeSet<StateId>> {
    mark_avoid_with(path, &rejecting_sinks(b))
}

/// As [`mark_avoid`] with precomputed rejecting sinks.
pub fn mark_avoid_with(path: &AcceptingPath, sinks: &[bool]) -> Vec<BTreeSet<StateId>> {
    let sink_set: BTreeSet<StateId> = (0..sinks.len()).filter(|&q| sinks[q]).collect();
    (0..path.states.len())
        .map(|i| {
            let from = path.states[i];
            let to = path.states[path.next_index(i)];
            let mut set = sink_set.clone();
            set.extend(path.states[..i].iter().copied());
            set.remove(&from);
            set.remove(&to);
            set
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::{persist_or_reach, universal};
    use crate::automata::{Alphabet, Component};
    use crate::ltl::PredicateInstance;
    use crate::taskseq::accepting_paths;

    #[test]
    fn persist_or_reach_epsilon_path() {
        let b = persist_or_reach();
        let path = &accepting_paths(&b, 0)[1];
        let sets = mark_avoid(&b, path);
        assert_eq!(sets[0], BTreeSet::from([3]));
        assert_eq!(sets[1], BTreeSet::from([0, 3]));
    }

    #[test]
    fn universal_has_nothing_to_avoid() {
        let b = universal([PredicateInstance::prop("a")]);
        let path = &accepting_paths(&b, 0)[0];
        assert!(mark_avoid(&b, path).iter().all(|s| s.is_empty()));
    }

    #[test]
    fn chain_with_trap() {
        // q0 -a-> q1 -b-> q2 (accepting, loops); c from anywhere goes to the trap t.
        let s = Alphabet::at_most_one(["a", "b", "c"].map(PredicateInstance::prop));
        // letters: {} a b c
        let b = Ldba::new(
            s,
            0,
            vec![false, false, true, false],
            vec![Component::Accepting; 4],
            vec![
                vec![0, 1, 0, 3],
                vec![1, 1, 2, 3],
                vec![2, 2, 2, 3],
                vec![3, 3, 3, 3],
            ],
            vec![],
            ["q0", "q1", "q2", "t"].map(String::from).to_vec(),
            false,
        )
        .unwrap();
        let path = accepting_paths(&b, 0)
            .into_iter()
            .find(|p| p.states == vec![0, 1, 2])
            .unwrap();
        for set in mark_avoid(&b, &path) {
            assert!(set.contains(&3));
        }
    }
}
