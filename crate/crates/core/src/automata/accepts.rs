use petgraph::algo::tarjan_scc;
use petgraph::graph::{DiGraph, NodeIndex};
use petgraph::visit::EdgeRef;
use std::collections::HashMap;

use super::ldba::{Ldba, StateId};
use crate::error::Result;
use crate::ltl::LassoWord;

/// How ε choices are resolved while checking acceptance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum EpsilonPolicy {
    /// Accept if some resolution of the ε choices yields an accepting run.
    #[default]
    Existential,
    /// Never take ε edges.
    Disabled,
}

/// Whether `b` accepts the lasso word `w`.
///
/// Builds the product of automaton states with lasso positions, in which ε edges
/// keep the position and letter edges advance it, then looks for a reachable
/// cycle through an accepting state that consumes at least one letter.
pub fn accepts(b: &Ldba, w: &LassoWord, policy: EpsilonPolicy) -> Result<bool> {
    let span = w.span();
    let letters: Vec<usize> = (0..span)
        .map(|i| b.alphabet().index_of(&w.at(i)))
        .collect::<Result<_>>()?;

    let mut g: DiGraph<(StateId, usize), bool> = DiGraph::new();
    let mut index: HashMap<(StateId, usize), NodeIndex> = HashMap::new();
    let start = g.add_node((b.initial(), 0));
    index.insert((b.initial(), 0), start);
    let mut stack = vec![start];
    while let Some(n) = stack.pop() {
        let (q, i) = g[n];
        let mut succ = vec![((b.successor(q, letters[i]), w.succ(i)), true)];
        if policy == EpsilonPolicy::Existential {
            succ.extend(b.epsilon_from(q).map(|(_, t)| ((t, i), false)));
        }
        for (key, is_letter) in succ {
            let m = *index.entry(key).or_insert_with(|| {
                let m = g.add_node(key);
                stack.push(m);
                m
            });
            g.add_edge(n, m, is_letter);
        }
    }

    for scc in tarjan_scc(&g) {
        let mut member = vec![false; g.node_count()];
        for n in &scc {
            member[n.index()] = true;
        }
        let letter_cycle = scc.iter().any(|&n| {
            g.edges(n)
                .any(|e| *e.weight() && member[e.target().index()])
        });
        if letter_cycle && scc.iter().any(|&n| b.is_accepting(g[n].0)) {
            return Ok(true);
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::{persist_or_reach, universal};
    use crate::ltl::{Assignment, PredicateInstance};

    fn p(n: &str) -> Assignment {
        Assignment::singleton(PredicateInstance::prop(n))
    }

    #[test]
    fn persist_or_reach_examples() {
        let b = persist_or_reach();
        let ex = EpsilonPolicy::Existential;
        assert!(accepts(
            &b,
            &LassoWord::new(vec![p("b")], vec![Assignment::empty()]).unwrap(),
            ex
        )
        .unwrap());
        assert!(accepts(
            &b,
            &LassoWord::new(vec![Assignment::empty()], vec![p("a")]).unwrap(),
            ex
        )
        .unwrap());
        assert!(!accepts(
            &b,
            &LassoWord::new(vec![], vec![Assignment::empty()]).unwrap(),
            ex
        )
        .unwrap());
        // Without the ε jump, G a is out of reach.
        let ga = LassoWord::new(vec![], vec![p("a")]).unwrap();
        assert!(!accepts(&b, &ga, EpsilonPolicy::Disabled).unwrap());
    }

    #[test]
    fn universal_accepts_everything() {
        let b = universal([PredicateInstance::prop("a")]);
        let w = LassoWord::new(vec![p("a")], vec![Assignment::empty(), p("a")]).unwrap();
        assert!(accepts(&b, &w, EpsilonPolicy::Existential).unwrap());
    }
}
