use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::alphabet::Alphabet;
use crate::error::{Error, Result};
use crate::ltl::{Assignment, BooleanFormula};
use crate::taskseq::template::template_for_letters;

pub type StateId = usize;

/// Which side of the `Q_N ⊎ Q_D` partition a state lives on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    Initial,
    Accepting,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EpsilonEdge {
    pub from: StateId,
    pub to: StateId,
}

/// A guarded transition, derived from the transition table on demand.
#[derive(Clone, Debug, PartialEq)]
pub struct Transition {
    pub guard: BooleanFormula,
    pub target: StateId,
    /// Letters (by index) taking this transition.
    pub letters: Vec<usize>,
}

/// Limit-deterministic Büchi automaton with an explicit transition table.
///
/// Non-ε transitions are total and deterministic by construction: `delta[q][i]`
/// is the unique successor of `q` on letter `i`. Each ε edge is identified by its
/// index in [`Ldba::epsilon_edges`].
#[derive(Clone, Debug, PartialEq)]
pub struct Ldba {
    alphabet: Alphabet,
    initial: StateId,
    accepting: Vec<bool>,
    component: Vec<Component>,
    delta: Vec<Vec<StateId>>,
    epsilon: Vec<EpsilonEdge>,
    names: Vec<String>,
    contracted: bool,
}

/// Smallest valid `Q_D`: ε targets and accepting states, closed under letter
/// successors. Everything else is `Q_N`.
pub fn infer_components(
    delta: &[Vec<StateId>],
    epsilon: &[EpsilonEdge],
    accepting: &[bool],
) -> Vec<Component> {
    let n = delta.len();
    let mut d = vec![false; n];
    let mut stack: Vec<StateId> = epsilon
        .iter()
        .map(|e| e.to)
        .chain((0..n).filter(|&q| accepting[q]))
        .collect();
    while let Some(q) = stack.pop() {
        if q >= n || d[q] {
            continue;
        }
        d[q] = true;
        stack.extend(delta[q].iter().copied());
    }
    d.into_iter()
        .map(|x| {
            if x {
                Component::Accepting
            } else {
                Component::Initial
            }
        })
        .collect()
}

impl Ldba {
    /// Builds and validates an automaton.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        alphabet: Alphabet,
        initial: StateId,
        accepting: Vec<bool>,
        component: Vec<Component>,
        delta: Vec<Vec<StateId>>,
        epsilon: Vec<EpsilonEdge>,
        names: Vec<String>,
        contracted: bool,
    ) -> Result<Self> {
        let mut epsilon = epsilon;
        epsilon.sort();
        epsilon.dedup();
        let b = Self {
            alphabet,
            initial,
            accepting,
            component,
            delta,
            epsilon,
            names,
            contracted,
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.delta.len();
        if n == 0 {
            return Err(Error::PartitionViolation("automaton has no states".into()));
        }
        if self.accepting.len() != n || self.component.len() != n || self.names.len() != n {
            return Err(Error::InvalidArgument(
                "state tables disagree in length".into(),
            ));
        }
        if self.initial >= n {
            return Err(Error::UnknownState(self.initial));
        }
        for (q, row) in self.delta.iter().enumerate() {
            if row.len() != self.alphabet.len() {
                return Err(Error::IncompleteTransition {
                    state: q,
                    assignment: self
                        .alphabet
                        .letter(row.len().min(self.alphabet.len() - 1))
                        .to_string(),
                });
            }
            if let Some(&t) = row.iter().find(|&&t| t >= n) {
                return Err(Error::UnknownState(t));
            }
        }
        for e in &self.epsilon {
            if e.from >= n || e.to >= n {
                return Err(Error::UnknownState(e.from.max(e.to)));
            }
        }
        if self.contracted {
            return Ok(());
        }
        let has_initial_component = self.component.contains(&Component::Initial);
        if has_initial_component && self.component[self.initial] != Component::Initial {
            return Err(Error::PartitionViolation(
                "initial state must lie in Q_N".into(),
            ));
        }
        for q in 0..n {
            if self.accepting[q] && self.component[q] != Component::Accepting {
                return Err(Error::PartitionViolation(format!(
                    "accepting state {q} lies in Q_N"
                )));
            }
            for &t in &self.delta[q] {
                if self.component[q] == Component::Accepting
                    && self.component[t] == Component::Initial
                {
                    return Err(Error::PartitionViolation(format!(
                        "non-epsilon transition {q} -> {t} leaves Q_D"
                    )));
                }
            }
        }
        for e in &self.epsilon {
            if self.component[e.from] != Component::Initial
                || self.component[e.to] != Component::Accepting
            {
                return Err(Error::PartitionViolation(format!(
                    "epsilon edge {} -> {} must go from Q_N to Q_D",
                    e.from, e.to
                )));
            }
        }
        Ok(())
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn num_states(&self) -> usize {
        self.delta.len()
    }

    pub fn states(&self) -> std::ops::Range<StateId> {
        0..self.num_states()
    }

    pub fn is_accepting(&self, q: StateId) -> bool {
        self.accepting[q]
    }

    pub fn accepting_states(&self) -> Vec<StateId> {
        self.states().filter(|&q| self.accepting[q]).collect()
    }

    pub fn component(&self, q: StateId) -> Component {
        self.component[q]
    }

    pub fn name(&self, q: StateId) -> &str {
        &self.names[q]
    }

    pub fn is_contracted(&self) -> bool {
        self.contracted
    }

    /// `δ(q, σ_i)` by letter index.
    pub fn successor(&self, q: StateId, letter: usize) -> StateId {
        self.delta[q][letter]
    }

    pub fn row(&self, q: StateId) -> &[StateId] {
        &self.delta[q]
    }

    /// `δ(q, σ)` for an arbitrary assignment, restricted to the alphabet's AP.
    pub fn step(&self, q: StateId, sigma: &Assignment) -> Result<StateId> {
        if q >= self.num_states() {
            return Err(Error::UnknownState(q));
        }
        Ok(self.delta[q][self.alphabet.index_of(sigma)?])
    }

    pub fn epsilon_edges(&self) -> &[EpsilonEdge] {
        &self.epsilon
    }

    /// `(edge id, target)` for every ε edge leaving `q`.
    pub fn epsilon_from(&self, q: StateId) -> impl Iterator<Item = (usize, StateId)> + '_ {
        self.epsilon
            .iter()
            .enumerate()
            .filter(move |(_, e)| e.from == q)
            .map(|(i, e)| (i, e.to))
    }

    pub fn has_epsilon(&self, q: StateId) -> bool {
        self.epsilon.iter().any(|e| e.from == q)
    }

    /// Guarded view of `q`'s non-ε transitions, one entry per distinct target,
    /// ordered by target id.
    pub fn transitions(&self, q: StateId) -> Vec<Transition> {
        let row = &self.delta[q];
        let mut targets: Vec<StateId> = row.clone();
        targets.sort();
        targets.dedup();
        targets
            .into_iter()
            .map(|t| {
                let mask: Vec<bool> = row.iter().map(|&x| x == t).collect();
                Transition {
                    guard: template_for_letters(&mask, &self.alphabet),
                    target: t,
                    letters: (0..row.len()).filter(|&i| mask[i]).collect(),
                }
            })
            .collect()
    }

    /// Guard over the letters `i` for which `pred(δ(q, σ_i))` holds.
    pub fn guard_where(&self, q: StateId, pred: impl Fn(StateId) -> bool) -> BooleanFormula {
        let mask: Vec<bool> = self.delta[q].iter().map(|&t| pred(t)).collect();
        template_for_letters(&mask, &self.alphabet)
    }

    pub fn to_json(&self) -> Value {
        let states: Vec<Value> = self
            .states()
            .map(|q| {
                json!({
                    "id": q,
                    "name": self.names[q],
                    "accepting": self.accepting[q],
                    "component": self.component[q],
                    "transitions": self.transitions(q).iter().map(|t| json!({
                        "guard": t.guard.to_string(),
                        "target": t.target,
                    })).collect::<Vec<_>>(),
                })
            })
            .collect();
        json!({
            "aps": self.alphabet.aps().iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "at_most_one_true": self.alphabet.is_at_most_one(),
            "initial": self.initial,
            "accepting": self.accepting_states(),
            "contracted": self.contracted,
            "states": states,
            "epsilon": self.epsilon.iter().enumerate().map(|(i, e)| json!({
                "id": i, "from": e.from, "to": e.to
            })).collect::<Vec<_>>(),
        })
    }

    /// Graphviz rendering; accepting states are double circles, ε edges dashed.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph ldba {\n  rankdir=LR;\n  start [shape=point];\n");
        for q in self.states() {
            let shape = if self.accepting[q] {
                "doublecircle"
            } else {
                "circle"
            };
            out.push_str(&format!("  q{q} [label=\"q{q}\", shape={shape}];\n"));
        }
        out.push_str(&format!("  start -> q{};\n", self.initial));
        for q in self.states() {
            for t in self.transitions(q) {
                let label = t.guard.to_string().replace('"', "\\\"");
                out.push_str(&format!("  q{q} -> q{} [label=\"{label}\"];\n", t.target));
            }
        }
        for (i, e) in self.epsilon.iter().enumerate() {
            out.push_str(&format!(
                "  q{} -> q{} [label=\"eps{i}\", style=dashed];\n",
                e.from, e.to
            ));
        }
        out.push_str("}\n");
        out
    }

    /// Relabels states in BFS order from the initial state (letters before ε
    /// edges), dropping unreachable states.
    pub fn reachable_canonical(&self) -> Ldba {
        let n = self.num_states();
        let mut order = vec![self.initial];
        let mut index = vec![usize::MAX; n];
        index[self.initial] = 0;
        let mut head = 0;
        while head < order.len() {
            let q = order[head];
            head += 1;
            let succ = self.delta[q]
                .iter()
                .copied()
                .chain(self.epsilon_from(q).map(|(_, t)| t));
            for t in succ {
                if index[t] == usize::MAX {
                    index[t] = order.len();
                    order.push(t);
                }
            }
        }
        Ldba {
            alphabet: self.alphabet.clone(),
            initial: 0,
            accepting: order.iter().map(|&q| self.accepting[q]).collect(),
            component: order.iter().map(|&q| self.component[q]).collect(),
            delta: order
                .iter()
                .map(|&q| self.delta[q].iter().map(|&t| index[t]).collect())
                .collect(),
            epsilon: {
                let mut e: Vec<_> = self
                    .epsilon
                    .iter()
                    .filter(|e| index[e.from] != usize::MAX)
                    .map(|e| EpsilonEdge {
                        from: index[e.from],
                        to: index[e.to],
                    })
                    .collect();
                e.sort();
                e
            },
            names: order.iter().map(|&q| self.names[q].clone()).collect(),
            contracted: self.contracted,
        }
    }

    /// Same automaton with `contracted` set; used by the contraction pass.
    pub(crate) fn raw(
        alphabet: Alphabet,
        initial: StateId,
        accepting: Vec<bool>,
        component: Vec<Component>,
        delta: Vec<Vec<StateId>>,
        epsilon: Vec<EpsilonEdge>,
        names: Vec<String>,
        contracted: bool,
    ) -> Ldba {
        let mut epsilon = epsilon;
        epsilon.sort();
        epsilon.dedup();
        Ldba {
            alphabet,
            initial,
            accepting,
            component,
            delta,
            epsilon,
            names,
            contracted,
        }
    }

    pub(crate) fn parts(&self) -> (&[bool], &[Component], &[Vec<StateId>], &[String]) {
        (&self.accepting, &self.component, &self.delta, &self.names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::PredicateInstance;

    pub(crate) fn universal() -> Ldba {
        let s = Alphabet::at_most_one([PredicateInstance::prop("a")]);
        Ldba::new(
            s,
            0,
            vec![true],
            vec![Component::Accepting],
            vec![vec![0, 0]],
            vec![],
            vec!["q0".into()],
            false,
        )
        .unwrap()
    }

    #[test]
    fn universal_automaton_has_true_guard() {
        let b = universal();
        let ts = b.transitions(0);
        assert_eq!(ts.len(), 1);
        assert_eq!(ts[0].guard, BooleanFormula::True);
    }

    #[test]
    fn partition_is_checked() {
        let s = Alphabet::at_most_one([PredicateInstance::prop("a")]);
        let bad = Ldba::new(
            s,
            0,
            vec![true, false],
            vec![Component::Initial, Component::Accepting],
            vec![vec![0, 1], vec![1, 1]],
            vec![],
            vec!["q0".into(), "q1".into()],
            false,
        );
        assert!(matches!(bad, Err(Error::PartitionViolation(_))));
    }
}
