//! LTL over parameterized predicate instances.

pub mod boolean;
pub mod formula;
pub mod json;
pub mod lasso;
pub mod parse;
pub mod predicate;

pub use boolean::{Assignment, BooleanFormula};
pub use formula::LtlFormula;
pub use lasso::{lasso_satisfies, LassoWord};
pub use parse::{parse_atom, parse_ltl};
pub use predicate::{PredicateInstance, PredicateSymbol, Signature};

/// `σ ⊨ β`.
pub fn eval_boolean(beta: &BooleanFormula, sigma: &Assignment) -> bool {
    beta.eval(sigma)
}
