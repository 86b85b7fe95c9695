//! Small hand-built automata used in documentation and tests.

use super::{Alphabet, Component, EpsilonEdge, Ldba};
use crate::ltl::PredicateInstance;

/// Contracted automaton for `(F G a()) | F b()`.
///
/// Letters are `0 = ∅`, `1 = {a}`, `2 = {b}`. `q0` waits on `¬b` and either
/// reads `b` into the accepting sink `q1` or jumps by ε into `q2`, which loops on
/// `a` and falls into the rejecting sink `q3` otherwise.
pub fn persist_or_reach() -> Ldba {
    let s = Alphabet::at_most_one([PredicateInstance::prop("a"), PredicateInstance::prop("b")]);
    Ldba::new(
        s,
        0,
        vec![false, true, true, false],
        vec![
            Component::Initial,
            Component::Accepting,
            Component::Accepting,
            Component::Accepting,
        ],
        vec![vec![0, 0, 1], vec![1, 1, 1], vec![3, 2, 3], vec![3, 3, 3]],
        vec![EpsilonEdge { from: 0, to: 2 }],
        (0..4).map(|i| format!("q{i}")).collect(),
        true,
    )
    .expect("valid sample automaton")
}

/// One accepting state with a `⊤` self-loop over the given propositions.
pub fn universal(aps: impl IntoIterator<Item = PredicateInstance>) -> Ldba {
    let s = Alphabet::at_most_one(aps);
    let n = s.len();
    Ldba::new(
        s,
        0,
        vec![true],
        vec![Component::Accepting],
        vec![vec![0; n]],
        vec![],
        vec!["q0".into()],
        false,
    )
    .expect("valid sample automaton")
}

/// The uncontracted automaton for `(F G a()) | F b()`: as [`persist_or_reach`], except that
/// after `b` the run waits in the non-accepting `q1` and must take a trivial ε
/// edge into the accepting `⊤` sink `q4`.
pub fn persist_or_reach_raw() -> Ldba {
    let s = Alphabet::at_most_one([PredicateInstance::prop("a"), PredicateInstance::prop("b")]);
    Ldba::new(
        s,
        0,
        vec![false, false, true, false, true],
        vec![
            Component::Initial,
            Component::Initial,
            Component::Accepting,
            Component::Accepting,
            Component::Accepting,
        ],
        vec![
            vec![0, 0, 1],
            vec![1, 1, 1],
            vec![3, 2, 3],
            vec![3, 3, 3],
            vec![4, 4, 4],
        ],
        vec![
            EpsilonEdge { from: 0, to: 2 },
            EpsilonEdge { from: 1, to: 4 },
        ],
        (0..5).map(|i| format!("q{i}")).collect(),
        false,
    )
    .expect("valid sample automaton")
}
