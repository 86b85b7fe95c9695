use std::collections::BTreeSet;

use super::predicate::PredicateInstance;

/// LTL abstract syntax over predicate instances.
///
/// `Or`, `Implies`, `Eventually` and `Always` are sugar; [`LtlFormula::normalize`]
/// rewrites them into the core grammar.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LtlFormula {
    True,
    Atom(PredicateInstance),
    Not(Box<LtlFormula>),
    And(Box<LtlFormula>, Box<LtlFormula>),
    Or(Box<LtlFormula>, Box<LtlFormula>),
    Implies(Box<LtlFormula>, Box<LtlFormula>),
    Next(Box<LtlFormula>),
    Until(Box<LtlFormula>, Box<LtlFormula>),
    Eventually(Box<LtlFormula>),
    Always(Box<LtlFormula>),
}

use LtlFormula as L;

impl LtlFormula {
    pub fn atom(p: PredicateInstance) -> Self {
        L::Atom(p)
    }

    pub fn prop(name: &str) -> Self {
        L::Atom(PredicateInstance::prop(name))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(self) -> Self {
        L::Not(Box::new(self))
    }

    pub fn and(self, rhs: Self) -> Self {
        L::And(Box::new(self), Box::new(rhs))
    }

    pub fn or(self, rhs: Self) -> Self {
        L::Or(Box::new(self), Box::new(rhs))
    }

    pub fn implies(self, rhs: Self) -> Self {
        L::Implies(Box::new(self), Box::new(rhs))
    }

    pub fn next(self) -> Self {
        L::Next(Box::new(self))
    }

    pub fn until(self, rhs: Self) -> Self {
        L::Until(Box::new(self), Box::new(rhs))
    }

    pub fn eventually(self) -> Self {
        L::Eventually(Box::new(self))
    }

    pub fn always(self) -> Self {
        L::Always(Box::new(self))
    }

    /// The set `AP_φ` of atoms occurring in the formula.
    pub fn atoms(&self) -> BTreeSet<PredicateInstance> {
        let mut out = BTreeSet::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeSet<PredicateInstance>) {
        match self {
            L::True => {}
            L::Atom(p) => {
                out.insert(p.clone());
            }
            L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => a.collect_atoms(out),
            L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) => {
                a.collect_atoms(out);
                b.collect_atoms(out);
            }
        }
    }

    /// Rewrites into `{True, Atom, Not, And, Next, Until}`.
    pub fn normalize(&self) -> Self {
        match self {
            L::True => L::True,
            L::Atom(p) => L::Atom(p.clone()),
            L::Not(a) => a.normalize().not(),
            L::And(a, b) => a.normalize().and(b.normalize()),
            L::Or(a, b) => a.normalize().not().and(b.normalize().not()).not(),
            L::Implies(a, b) => a.normalize().and(b.normalize().not()).not(),
            L::Next(a) => a.normalize().next(),
            L::Until(a, b) => a.normalize().until(b.normalize()),
            L::Eventually(a) => L::True.until(a.normalize()),
            L::Always(a) => L::True.until(a.normalize().not()).not(),
        }
    }

    pub fn is_core(&self) -> bool {
        match self {
            L::True | L::Atom(_) => true,
            L::Not(a) | L::Next(a) => a.is_core(),
            L::And(a, b) | L::Until(a, b) => a.is_core() && b.is_core(),
            L::Or(..) | L::Implies(..) | L::Eventually(..) | L::Always(..) => false,
        }
    }

    /// Every syntactically distinct subformula, including `self`.
    pub fn subformulas(&self) -> BTreeSet<LtlFormula> {
        let mut out = BTreeSet::new();
        self.collect_subformulas(&mut out);
        out
    }

    fn collect_subformulas(&self, out: &mut BTreeSet<LtlFormula>) {
        if !out.insert(self.clone()) {
            return;
        }
        match self {
            L::True | L::Atom(_) => {}
            L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => a.collect_subformulas(out),
            L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) => {
                a.collect_subformulas(out);
                b.collect_subformulas(out);
            }
        }
    }

    /// Substitutes every atom through `f`.
    pub fn map_atoms(&self, f: &mut impl FnMut(&PredicateInstance) -> PredicateInstance) -> Self {
        match self {
            L::True => L::True,
            L::Atom(p) => L::Atom(f(p)),
            L::Not(a) => a.map_atoms(f).not(),
            L::Next(a) => a.map_atoms(f).next(),
            L::Eventually(a) => a.map_atoms(f).eventually(),
            L::Always(a) => a.map_atoms(f).always(),
            L::And(a, b) => {
                let a = a.map_atoms(f);
                a.and(b.map_atoms(f))
            }
            L::Or(a, b) => {
                let a = a.map_atoms(f);
                a.or(b.map_atoms(f))
            }
            L::Implies(a, b) => {
                let a = a.map_atoms(f);
                a.implies(b.map_atoms(f))
            }
            L::Until(a, b) => {
                let a = a.map_atoms(f);
                a.until(b.map_atoms(f))
            }
        }
    }

    pub fn size(&self) -> usize {
        match self {
            L::True | L::Atom(_) => 1,
            L::Not(a) | L::Next(a) | L::Eventually(a) | L::Always(a) => 1 + a.size(),
            L::And(a, b) | L::Or(a, b) | L::Implies(a, b) | L::Until(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> LtlFormula {
        LtlFormula::prop("a")
    }
    fn b() -> LtlFormula {
        LtlFormula::prop("b")
    }

    #[test]
    fn normalize_always() {
        let g = a().always().normalize();
        assert_eq!(g, LtlFormula::True.until(a().not()).not());
    }

    #[test]
    fn normalize_true_is_fixpoint() {
        assert_eq!(LtlFormula::True.normalize(), LtlFormula::True);
    }

    #[test]
    fn normalize_or_is_de_morgan() {
        assert_eq!(a().or(b()).normalize(), a().not().and(b().not()).not());
    }

    #[test]
    fn atoms_are_collected() {
        let f = a().until(b().eventually()).and(a().next());
        assert_eq!(f.atoms().len(), 2);
        assert!(f.normalize().is_core());
        assert!(!f.is_core());
    }
}
