use std::collections::BTreeSet;

use crate::automata::Alphabet;
use crate::ltl::{Assignment, BooleanFormula, PredicateInstance};

/// Smallest template formula whose models over `Σ` are exactly `reach`.
///
/// Under at-most-one-true every nonempty letter is a single proposition, so a set
/// without `∅` is an OR of its propositions (bare when there is one) and a set
/// containing `∅` is the negation of the propositions it leaves out, `¬p` when
/// exactly one is missing. Unrestricted alphabets fall back to a full DNF.
pub fn formula_template(reach: &BTreeSet<Assignment>, alphabet: &Alphabet) -> BooleanFormula {
    let mask: Vec<bool> = alphabet
        .letters()
        .iter()
        .map(|l| reach.contains(l))
        .collect();
    template_for_letters(&mask, alphabet)
}

/// As [`formula_template`], with the set given as a membership mask over letter indices.
pub fn template_for_letters(mask: &[bool], alphabet: &Alphabet) -> BooleanFormula {
    debug_assert_eq!(mask.len(), alphabet.len());
    if mask.iter().all(|m| !m) {
        return BooleanFormula::False;
    }
    if mask.iter().all(|m| *m) {
        return BooleanFormula::True;
    }
    let aps = alphabet.aps();
    if alphabet.is_at_most_one() {
        if !mask[0] {
            let members = (1..mask.len())
                .filter(|&i| mask[i])
                .map(|i| aps[i - 1].clone());
            BooleanFormula::any_of(members)
        } else {
            let excluded = (1..mask.len())
                .filter(|&i| !mask[i])
                .map(|i| aps[i - 1].clone());
            BooleanFormula::Not(Box::new(BooleanFormula::any_of(excluded)))
        }
    } else {
        let cubes: Vec<BooleanFormula> = (0..mask.len())
            .filter(|&i| mask[i])
            .map(|i| cube(i, aps))
            .collect();
        if cubes.len() == 1 {
            cubes.into_iter().next().unwrap()
        } else {
            BooleanFormula::Or(cubes)
        }
    }
}

fn cube(bits: usize, aps: &[PredicateInstance]) -> BooleanFormula {
    let lits: Vec<BooleanFormula> = aps
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let atom = BooleanFormula::Atom(p.clone());
            if bits >> i & 1 == 1 {
                atom
            } else {
                BooleanFormula::Not(Box::new(atom))
            }
        })
        .collect();
    match lits.len() {
        0 => BooleanFormula::True,
        1 => lits.into_iter().next().unwrap(),
        _ => BooleanFormula::And(lits),
    }
}
