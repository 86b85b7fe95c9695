use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ltl::{Assignment, PredicateInstance};

/// The alphabet `Σ ⊆ 2^AP`, enumerated explicitly.
///
/// Under the at-most-one-true restriction `Σ = {∅} ∪ {{p} : p ∈ AP}`;
/// otherwise `Σ = 2^AP`. Letters are indexed: `∅` is always letter 0, and in the
/// restricted alphabet `{aps[i]}` is letter `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    aps: Vec<PredicateInstance>,
    at_most_one: bool,
}

impl Alphabet {
    pub fn new(aps: impl IntoIterator<Item = PredicateInstance>, at_most_one: bool) -> Self {
        let mut aps: Vec<_> = aps.into_iter().collect();
        aps.sort();
        aps.dedup();
        Self { aps, at_most_one }
    }

    pub fn at_most_one(aps: impl IntoIterator<Item = PredicateInstance>) -> Self {
        Self::new(aps, true)
    }

    pub fn aps(&self) -> &[PredicateInstance] {
        &self.aps
    }

    pub fn is_at_most_one(&self) -> bool {
        self.at_most_one
    }

    pub fn len(&self) -> usize {
        if self.at_most_one {
            self.aps.len() + 1
        } else {
            1 << self.aps.len()
        }
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn letter(&self, index: usize) -> Assignment {
        if self.at_most_one {
            match index {
                0 => Assignment::empty(),
                i => Assignment::singleton(self.aps[i - 1].clone()),
            }
        } else {
            self.aps
                .iter()
                .enumerate()
                .filter(|(i, _)| index >> i & 1 == 1)
                .map(|(_, p)| p.clone())
                .collect()
        }
    }

    pub fn letters(&self) -> Vec<Assignment> {
        (0..self.len()).map(|i| self.letter(i)).collect()
    }

    /// Index of `σ ∩ AP`; fails if that intersection is not a letter of `Σ`.
    pub fn index_of(&self, sigma: &Assignment) -> Result<usize> {
        let mut bits = 0usize;
        let mut count = 0;
        let mut single = 0;
        for (i, p) in self.aps.iter().enumerate() {
            if sigma.contains(p) {
                bits |= 1 << i;
                count += 1;
                single = i + 1;
            }
        }
        if self.at_most_one {
            match count {
                0 => Ok(0),
                1 => Ok(single),
                _ => Err(Error::AlphabetViolation(
                    sigma.restrict(&self.aps).to_string(),
                )),
            }
        } else {
            Ok(bits)
        }
    }

    /// Position of the proposition in `aps`.
    pub fn ap_index(&self, p: &PredicateInstance) -> Option<usize> {
        self.aps.binary_search(p).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: &str) -> PredicateInstance {
        PredicateInstance::prop(n)
    }

    #[test]
    fn restricted_letters() {
        let s = Alphabet::at_most_one([p("b"), p("a")]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.letter(1), Assignment::singleton(p("a")));
        assert_eq!(s.index_of(&Assignment::singleton(p("b"))).unwrap(), 2);
        let both: Assignment = [p("a"), p("b")].into_iter().collect();
        assert!(s.index_of(&both).is_err());
        // Propositions outside AP are ignored.
        assert_eq!(s.index_of(&Assignment::singleton(p("z"))).unwrap(), 0);
    }

    #[test]
    fn full_powerset() {
        let s = Alphabet::new([p("a"), p("b")], false);
        assert_eq!(s.len(), 4);
        for i in 0..4 {
            assert_eq!(s.index_of(&s.letter(i)).unwrap(), i);
        }
    }
}
