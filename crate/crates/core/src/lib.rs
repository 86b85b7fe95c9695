//! Temporal task specifications over parameterized predicates.
//!
//! The pipeline: parse an LTL formula whose atoms are predicate instances such as
//! `at(0.0,0.0,1.0)`, compile it into a limit-deterministic Büchi automaton
//! ([`automata`]), extract reach-avoid sequences of Boolean formulae from any
//! automaton state ([`taskseq`]), and execute those tasks against deterministic
//! simulations ([`envs`]) through a product-automaton runtime ([`runtime`]).

pub mod automata;
pub mod curriculum;
pub mod envs;
pub mod error;
pub mod eval;
pub mod ltl;
pub mod policies;
pub mod runtime;
pub mod taskseq;

pub use error::{Error, Result};
pub use ltl::{
    eval_boolean, lasso_satisfies, parse_ltl, Assignment, BooleanFormula, LassoWord, LtlFormula,
    PredicateInstance, PredicateSymbol, Signature,
};
