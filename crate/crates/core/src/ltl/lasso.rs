use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::boolean::Assignment;
use super::formula::LtlFormula;
use crate::error::{Error, Result};

/// Finite representation `prefix · cycle^ω` of an ω-word.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LassoWord {
    prefix: Vec<Assignment>,
    cycle: Vec<Assignment>,
}

impl LassoWord {
    pub fn new(prefix: Vec<Assignment>, cycle: Vec<Assignment>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::InvalidArgument(
                "lasso cycle must be nonempty".into(),
            ));
        }
        Ok(Self { prefix, cycle })
    }

    pub fn prefix(&self) -> &[Assignment] {
        &self.prefix
    }

    pub fn cycle(&self) -> &[Assignment] {
        &self.cycle
    }

    /// Number of distinct positions, `|prefix| + |cycle|`.
    pub fn span(&self) -> usize {
        self.prefix.len() + self.cycle.len()
    }

    /// `w[i]` for any `i ≥ 0`.
    pub fn at(&self, i: usize) -> &Assignment {
        self.letter(self.fold(i))
    }

    /// Maps an absolute position to its representative in `0..span()`.
    pub fn fold(&self, i: usize) -> usize {
        if i < self.prefix.len() {
            i
        } else {
            self.prefix.len() + (i - self.prefix.len()) % self.cycle.len()
        }
    }

    /// Successor of a representative position.
    pub fn succ(&self, p: usize) -> usize {
        if p + 1 < self.span() {
            p + 1
        } else {
            self.prefix.len()
        }
    }

    fn letter(&self, p: usize) -> &Assignment {
        if p < self.prefix.len() {
            &self.prefix[p]
        } else {
            &self.cycle[p - self.prefix.len()]
        }
    }

    /// All lasso words over `letters` with `|prefix| ≤ max_prefix` and
    /// `1 ≤ |cycle| ≤ max_cycle`.
    pub fn enumerate(
        letters: &[Assignment],
        max_prefix: usize,
        max_cycle: usize,
    ) -> Vec<LassoWord> {
        let words = |max: usize, min: usize| {
            let mut out: Vec<Vec<Assignment>> = Vec::new();
            let mut layer: Vec<Vec<Assignment>> = vec![Vec::new()];
            for len in 0..=max {
                if len >= min {
                    out.extend(layer.iter().cloned());
                }
                layer = layer
                    .iter()
                    .flat_map(|w| {
                        letters.iter().map(move |l| {
                            let mut w = w.clone();
                            w.push(l.clone());
                            w
                        })
                    })
                    .collect();
            }
            out
        };
        let prefixes = words(max_prefix, 0);
        let cycles = words(max_cycle, 1);
        let mut out = Vec::with_capacity(prefixes.len() * cycles.len());
        for p in &prefixes {
            for c in &cycles {
                out.push(LassoWord {
                    prefix: p.clone(),
                    cycle: c.clone(),
                });
            }
        }
        out
    }
}

/// Truth value of `φ` at every representative position of `w`.
///
/// Until is the least fixpoint of `v[p] = ψ[p] ∨ (φ[p] ∧ v[succ p])`, computed by
/// iterating from all-false; every position is a pure function of the
/// (position, subformula) pair, so memoising per subformula is exact.
fn positions(
    w: &LassoWord,
    f: &LtlFormula,
    memo: &mut HashMap<LtlFormula, Vec<bool>>,
) -> Vec<bool> {
    if let Some(v) = memo.get(f) {
        return v.clone();
    }
    let n = w.span();
    let v: Vec<bool> = match f {
        LtlFormula::True => vec![true; n],
        LtlFormula::Atom(a) => (0..n).map(|p| w.letter(p).contains(a)).collect(),
        LtlFormula::Not(a) => positions(w, a, memo).into_iter().map(|x| !x).collect(),
        LtlFormula::And(a, b) => {
            let (x, y) = (positions(w, a, memo), positions(w, b, memo));
            x.iter().zip(&y).map(|(a, b)| *a && *b).collect()
        }
        LtlFormula::Or(a, b) => {
            let (x, y) = (positions(w, a, memo), positions(w, b, memo));
            x.iter().zip(&y).map(|(a, b)| *a || *b).collect()
        }
        LtlFormula::Implies(a, b) => {
            let (x, y) = (positions(w, a, memo), positions(w, b, memo));
            x.iter().zip(&y).map(|(a, b)| !*a || *b).collect()
        }
        LtlFormula::Next(a) => {
            let x = positions(w, a, memo);
            (0..n).map(|p| x[w.succ(p)]).collect()
        }
        LtlFormula::Until(a, b) => until(w, &positions(w, a, memo), &positions(w, b, memo)),
        LtlFormula::Eventually(a) => until(w, &vec![true; n], &positions(w, a, memo)),
        LtlFormula::Always(a) => {
            let neg: Vec<bool> = positions(w, a, memo).into_iter().map(|x| !x).collect();
            until(w, &vec![true; n], &neg)
                .into_iter()
                .map(|x| !x)
                .collect()
        }
    };
    memo.insert(f.clone(), v.clone());
    v
}

fn until(w: &LassoWord, hold: &[bool], goal: &[bool]) -> Vec<bool> {
    let n = w.span();
    let mut v = vec![false; n];
    loop {
        let mut changed = false;
        for p in (0..n).rev() {
            let nv = goal[p] || (hold[p] && v[w.succ(p)]);
            if nv != v[p] {
                v[p] = nv;
                changed = true;
            }
        }
        if !changed {
            return v;
        }
    }
}

/// `w ⊨ φ` for a lasso word.
pub fn lasso_satisfies(w: &LassoWord, f: &LtlFormula) -> bool {
    positions(w, f, &mut HashMap::new())[0]
}

/// `w[i..] ⊨ φ` for every representative position `i`.
pub fn lasso_positions(w: &LassoWord, f: &LtlFormula) -> Vec<bool> {
    positions(w, f, &mut HashMap::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltl::predicate::PredicateInstance;

    fn s(names: &[&str]) -> Assignment {
        names.iter().map(|n| PredicateInstance::prop(n)).collect()
    }

    #[test]
    fn eventually_b_at_step_zero() {
        let w = LassoWord::new(vec![s(&["b"])], vec![s(&[])]).unwrap();
        assert!(lasso_satisfies(&w, &LtlFormula::prop("b").eventually()));
    }

    #[test]
    fn persistence() {
        let w = LassoWord::new(vec![s(&[])], vec![s(&["a"])]).unwrap();
        assert!(lasso_satisfies(
            &w,
            &LtlFormula::prop("a").always().eventually()
        ));
    }

    #[test]
    fn always_fails_on_alternation() {
        let w = LassoWord::new(vec![], vec![s(&["a"]), s(&[])]).unwrap();
        assert!(!lasso_satisfies(&w, &LtlFormula::prop("a").always()));
        assert!(lasso_satisfies(
            &w,
            &LtlFormula::prop("a").eventually().always()
        ));
    }

    #[test]
    fn empty_cycle_rejected() {
        assert!(LassoWord::new(vec![], vec![]).is_err());
    }

    #[test]
    fn enumeration_counts() {
        let letters = vec![s(&[]), s(&["a"]), s(&["b"])];
        // (1 + 3 + 9 + 27) prefixes × (3 + 9 + 27) cycles
        assert_eq!(LassoWord::enumerate(&letters, 3, 3).len(), 40 * 39);
    }

    #[test]
    fn fold_wraps_into_cycle() {
        let w = LassoWord::new(vec![s(&[]), s(&[])], vec![s(&["a"]), s(&["b"]), s(&[])]).unwrap();
        assert_eq!(w.fold(1), 1);
        assert_eq!(w.fold(5), 2);
        assert_eq!(w.fold(7), 4);
        assert_eq!(w.at(8), &s(&["a"]));
    }
}
