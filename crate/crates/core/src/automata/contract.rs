use super::ldba::{Ldba, StateId};

/// Removes ε edges that are always safe to take.
///
/// A state `q` whose only ε edge leads to `t` can be replaced by `t` when the
/// two behave alike forever: on every letter their successors are equal or are
/// again such a pair, and `t` is accepting whenever `q` is. This is computed as
/// a greatest fixpoint. Every reference to a replaced `q` is redirected to `t`,
/// and the result is flagged as contracted.
pub fn contract(b: &Ldba) -> Ldba {
    let n = b.num_states();
    let mut target: Vec<Option<StateId>> = b
        .states()
        .map(|q| {
            let eps: Vec<StateId> = b.epsilon_from(q).map(|(_, t)| t).collect();
            match eps.as_slice() {
                [t] if *t != q
                    && (!b.is_accepting(q) || b.is_accepting(*t))
                    && !b.has_epsilon(*t) =>
                {
                    Some(*t)
                }
                _ => None,
            }
        })
        .collect();
    loop {
        let mut changed = false;
        for q in 0..n {
            let Some(t) = target[q] else { continue };
            let ok = (0..b.alphabet().len()).all(|l| {
                let (p, u) = (b.successor(q, l), b.successor(t, l));
                p == u || target[p] == Some(u)
            });
            if !ok {
                target[q] = None;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    let map = |q: StateId| target[q].unwrap_or(q);
    let (acc, comp, delta, names) = b.parts();
    let delta: Vec<Vec<StateId>> = delta
        .iter()
        .map(|row| row.iter().map(|&t| map(t)).collect())
        .collect();
    let epsilon = b
        .epsilon_edges()
        .iter()
        .filter(|e| target[e.from].is_none())
        .map(|e| super::EpsilonEdge {
            from: e.from,
            to: map(e.to),
        })
        .collect();
    Ldba::raw(
        b.alphabet().clone(),
        map(b.initial()),
        acc.to_vec(),
        comp.to_vec(),
        delta,
        epsilon,
        names.to_vec(),
        true,
    )
    .reachable_canonical()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::samples::{persist_or_reach, persist_or_reach_raw};
    use crate::automata::translate;
    use crate::ltl::{parse_ltl, Signature};

    #[test]
    fn necessary_epsilon_is_kept() {
        let b = persist_or_reach();
        let c = contract(&b);
        assert_eq!(c.num_states(), 4);
        assert_eq!(c.epsilon_edges().len(), 1);
    }

    #[test]
    fn trivial_epsilon_is_removed() {
        let c = contract(&persist_or_reach_raw());
        assert_eq!(c.num_states(), 4);
        assert_eq!(
            c.epsilon_edges(),
            &[crate::automata::EpsilonEdge { from: 0, to: 2 }]
        );
        assert_eq!(c.row(0), persist_or_reach().row(0));
        assert_eq!(c.accepting_states(), vec![1, 2]);
    }

    #[test]
    fn safety_jump_is_removed() {
        let f = parse_ltl("G a()", &Signature::permissive()).unwrap();
        let b = translate(&f).unwrap();
        assert_eq!(b.epsilon_edges().len(), 1);
        let c = contract(&b);
        assert!(c.epsilon_edges().is_empty());
        assert_eq!(c.num_states(), 2);
        assert!(c.is_contracted());
    }

    #[test]
    fn no_epsilon_is_fixpoint() {
        let f = parse_ltl("a() U b()", &Signature::permissive()).unwrap();
        let b = translate(&f).unwrap();
        let c = contract(&b);
        assert_eq!(c.num_states(), b.num_states());
    }
}
