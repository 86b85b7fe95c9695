#![allow(dead_code)]

use predltl::automata::{Alphabet, Component, EpsilonEdge, Ldba};
use predltl::PredicateInstance;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn props(n: usize) -> Vec<PredicateInstance> {
    ["a", "b", "c", "d"][..n]
        .iter()
        .map(|s| PredicateInstance::prop(s))
        .collect()
}

/// A random automaton with at most `max_states` states over at most
/// `max_atoms` propositions. Accepting-component states only reach their own
/// component, and ε edges only leave the initial component.
pub fn random_ldba(rng: &mut ChaCha8Rng, max_states: usize, max_atoms: usize) -> Ldba {
    let n = rng.gen_range(1..=max_states);
    let alphabet = Alphabet::at_most_one(props(rng.gen_range(1..=max_atoms)));
    let letters = alphabet.len();
    let mut in_d: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.6)).collect();
    // The initial state is in the initial component whenever that is nonempty.
    if in_d.contains(&false) {
        in_d[0] = false;
    }
    let d_states: Vec<usize> = (0..n).filter(|&q| in_d[q]).collect();
    let delta = (0..n)
        .map(|q| {
            (0..letters)
                .map(|_| {
                    if in_d[q] {
                        d_states[rng.gen_range(0..d_states.len())]
                    } else {
                        rng.gen_range(0..n)
                    }
                })
                .collect()
        })
        .collect();
    let accepting = (0..n).map(|q| in_d[q] && rng.gen_bool(0.5)).collect();
    let mut epsilon = Vec::new();
    if !d_states.is_empty() {
        for q in (0..n).filter(|&q| !in_d[q]) {
            for _ in 0..rng.gen_range(0..=2) {
                epsilon.push(EpsilonEdge {
                    from: q,
                    to: d_states[rng.gen_range(0..d_states.len())],
                });
            }
        }
    }
    let component = in_d
        .iter()
        .map(|&d| {
            if d {
                Component::Accepting
            } else {
                Component::Initial
            }
        })
        .collect();
    Ldba::new(
        alphabet,
        0,
        accepting,
        component,
        delta,
        epsilon,
        (0..n).map(|i| format!("q{i}")).collect(),
        false,
    )
    .expect("generator respects the partition")
}
