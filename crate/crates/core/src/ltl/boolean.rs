use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::formula::LtlFormula;
use super::predicate::PredicateInstance;

/// The set of propositions true at one time step.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Assignment(pub BTreeSet<PredicateInstance>);

impl Assignment {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn singleton(p: PredicateInstance) -> Self {
        Self(BTreeSet::from([p]))
    }

    pub fn contains(&self, p: &PredicateInstance) -> bool {
        self.0.contains(p)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PredicateInstance> {
        self.0.iter()
    }

    /// Keeps only the propositions in `aps`.
    pub fn restrict(&self, aps: &[PredicateInstance]) -> Self {
        Self(self.0.iter().filter(|p| aps.contains(p)).cloned().collect())
    }
}

impl FromIterator<PredicateInstance> for Assignment {
    fn from_iter<I: IntoIterator<Item = PredicateInstance>>(iter: I) -> Self {
        Self(iter.into_iter().collect())
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p}")?;
        }
        write!(f, "}}")
    }
}

/// Propositional formula over predicate instances.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BooleanFormula {
    True,
    False,
    Atom(PredicateInstance),
    Not(Box<BooleanFormula>),
    And(Vec<BooleanFormula>),
    Or(Vec<BooleanFormula>),
}

impl BooleanFormula {
    pub fn eval(&self, sigma: &Assignment) -> bool {
        match self {
            BooleanFormula::True => true,
            BooleanFormula::False => false,
            BooleanFormula::Atom(p) => sigma.contains(p),
            BooleanFormula::Not(a) => !a.eval(sigma),
            BooleanFormula::And(xs) => xs.iter().all(|x| x.eval(sigma)),
            BooleanFormula::Or(xs) => xs.iter().any(|x| x.eval(sigma)),
        }
    }

    /// Disjunction of atoms; one atom stays bare, none gives `False`.
    pub fn any_of(atoms: impl IntoIterator<Item = PredicateInstance>) -> Self {
        let mut xs: Vec<_> = atoms.into_iter().map(BooleanFormula::Atom).collect();
        match xs.len() {
            0 => BooleanFormula::False,
            1 => xs.pop().unwrap(),
            _ => BooleanFormula::Or(xs),
        }
    }

    pub fn atoms(&self) -> BTreeSet<PredicateInstance> {
        let mut out = BTreeSet::new();
        self.collect(&mut out);
        out
    }

    fn collect(&self, out: &mut BTreeSet<PredicateInstance>) {
        match self {
            BooleanFormula::True | BooleanFormula::False => {}
            BooleanFormula::Atom(p) => {
                out.insert(p.clone());
            }
            BooleanFormula::Not(a) => a.collect(out),
            BooleanFormula::And(xs) | BooleanFormula::Or(xs) => {
                xs.iter().for_each(|x| x.collect(out))
            }
        }
    }

    /// Reads a temporal-operator-free LTL formula as a Boolean one; `!true`
    /// becomes `False`.
    pub fn from_ltl(f: &LtlFormula) -> crate::error::Result<Self> {
        Ok(match f {
            LtlFormula::True => BooleanFormula::True,
            LtlFormula::Atom(p) => BooleanFormula::Atom(p.clone()),
            LtlFormula::Not(x) if **x == LtlFormula::True => BooleanFormula::False,
            LtlFormula::Not(x) => BooleanFormula::Not(Box::new(Self::from_ltl(x)?)),
            LtlFormula::And(a, b) => {
                BooleanFormula::And(vec![Self::from_ltl(a)?, Self::from_ltl(b)?])
            }
            LtlFormula::Or(a, b) => {
                BooleanFormula::Or(vec![Self::from_ltl(a)?, Self::from_ltl(b)?])
            }
            LtlFormula::Implies(a, b) => BooleanFormula::Or(vec![
                BooleanFormula::Not(Box::new(Self::from_ltl(a)?)),
                Self::from_ltl(b)?,
            ]),
            other => {
                return Err(crate::error::Error::UnsupportedFragment(format!(
                    "temporal operator in Boolean formula: {other}"
                )))
            }
        })
    }

    /// Embeds into LTL. `False` becomes `!true`.
    pub fn to_ltl(&self) -> LtlFormula {
        fn fold(
            xs: &[BooleanFormula],
            unit: LtlFormula,
            join: fn(LtlFormula, LtlFormula) -> LtlFormula,
        ) -> LtlFormula {
            let mut it = xs.iter().map(BooleanFormula::to_ltl);
            match it.next() {
                None => unit,
                Some(first) => it.fold(first, join),
            }
        }
        match self {
            BooleanFormula::True => LtlFormula::True,
            BooleanFormula::False => LtlFormula::True.not(),
            BooleanFormula::Atom(p) => LtlFormula::Atom(p.clone()),
            BooleanFormula::Not(a) => a.to_ltl().not(),
            BooleanFormula::And(xs) => fold(xs, LtlFormula::True, LtlFormula::and),
            BooleanFormula::Or(xs) => fold(xs, LtlFormula::True.not(), LtlFormula::or),
        }
    }
}

impl fmt::Display for BooleanFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn child(f: &mut fmt::Formatter<'_>, x: &BooleanFormula) -> fmt::Result {
            match x {
                BooleanFormula::And(_) | BooleanFormula::Or(_) => write!(f, "({x})"),
                _ => write!(f, "{x}"),
            }
        }
        match self {
            BooleanFormula::True => write!(f, "true"),
            BooleanFormula::False => write!(f, "false"),
            BooleanFormula::Atom(p) => write!(f, "{p}"),
            BooleanFormula::Not(a) => {
                write!(f, "!")?;
                child(f, a)
            }
            BooleanFormula::And(xs) | BooleanFormula::Or(xs) => {
                let sep = if matches!(self, BooleanFormula::And(_)) {
                    " & "
                } else {
                    " | "
                };
                for (i, x) in xs.iter().enumerate() {
                    if i > 0 {
                        write!(f, "{sep}")?;
                    }
                    child(f, x)?;
                }
                Ok(())
            }
        }
    }
}

impl Serialize for BooleanFormula {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}
